# Copyright The Caikit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Deterministic stand-in for a chat model.

A script is either a transcript (responses returned in call order) or an
ordered list of rules matched against the concatenated request text, where the
first matching rule wins.
"""

# Standard
from typing import Any, Dict, Iterable, List, Optional, Pattern, Union
import json
import re
import threading

# First Party
from caikit.core.exceptions import error_handler
import alog

# Local
from ...data_model import (
    CallKind,
    ChatExchange,
    ChatMessage,
    ModelConfig,
    PipelineTrace,
)
from ...exceptions import NoMatchingRule, ScriptExhausted
from .base import ChatBackendBase

log = alog.use_channel("SCRIPTED")
error = error_handler.get(log)


class ScriptRule:
    """Respond with `response` when the request matches `pattern`.

    A rule with `times` set stops matching after that many uses.
    """

    def __init__(
        self,
        response: str,
        contains: Optional[str] = None,
        pattern: Optional[str] = None,
        times: Optional[int] = None,
    ):
        error.value_check(
            "<RRR93310547E>",
            (contains is None) != (pattern is None),
            "A rule needs exactly one of contains / pattern",
        )
        error.type_check("<RRR93310548E>", str, response=response)
        self.response = response
        self.contains = contains
        self.pattern: Optional[Pattern] = (
            re.compile(pattern, re.DOTALL) if pattern is not None else None
        )
        self.remaining = times

    @classmethod
    def from_dict(cls, rule: Dict[str, Any]) -> "ScriptRule":
        return cls(
            response=rule["response"],
            contains=rule.get("contains"),
            pattern=rule.get("pattern"),
            times=rule.get("times"),
        )

    def matches(self, prompt: str) -> bool:
        if self.contains is not None:
            return self.contains in prompt
        return self.pattern.search(prompt) is not None


class ScriptedBackend(ChatBackendBase):
    def __init__(
        self,
        transcript: Optional[Iterable[str]] = None,
        rules: Optional[Iterable[Union[ScriptRule, Dict[str, Any]]]] = None,
        name: str = "scripted",
    ):
        super().__init__()
        error.value_check(
            "<RRR93310549E>",
            (transcript is None) != (rules is None),
            "A script is either a transcript or a rule list",
        )
        self.name = name
        self._transcript = list(transcript) if transcript is not None else None
        self._rules = (
            [
                rule if isinstance(rule, ScriptRule) else ScriptRule.from_dict(rule)
                for rule in rules
            ]
            if rules is not None
            else None
        )
        self._position = 0
        self._lock = threading.Lock()

    @classmethod
    def from_file(cls, path: str) -> "ScriptedBackend":
        """Load `{"transcript": [...]}`, `{"rules": [...]}` or a bare list"""
        error.file_check("<RRR93310550E>", path)
        with open(path, "r", encoding="utf-8") as handle:
            script = json.load(handle)
        return scripted_backend(script, name=path)

    @classmethod
    def from_trace(cls, trace: PipelineTrace) -> "ScriptedBackend":
        """Backend replaying the model responses recorded in a trace"""
        responses = [
            call.response_text
            for call in trace.backend_call_log
            if call.kind == CallKind.MODEL.value
        ]
        return cls(transcript=responses, name=f"replay:{trace.query.question_id}")

    @property
    def endpoint(self) -> str:
        return self.name

    @property
    def ordered_replay(self) -> bool:
        return self._transcript is not None

    @property
    def remaining(self) -> Optional[int]:
        """Unused transcript responses, None in rules mode"""
        if self._transcript is None:
            return None
        return len(self._transcript) - self._position

    def _complete(
        self, config: ModelConfig, messages: List[ChatMessage]
    ) -> ChatExchange:
        with self._lock:
            if self._transcript is not None:
                response = self._next_transcript_entry()
            else:
                response = self._match_rule(messages)
        return ChatExchange(
            messages=list(messages),
            response_text=response,
            usage=None,
            latency_seconds=0.0,
        )

    def _next_transcript_entry(self) -> str:
        if self._position >= len(self._transcript):
            error(
                "<RRR93310551E>",
                ScriptExhausted(
                    f"Transcript of {len(self._transcript)} responses exhausted "
                    f"[endpoint={self.name}]"
                ),
            )
        response = self._transcript[self._position]
        self._position += 1
        return response

    def _match_rule(self, messages: List[ChatMessage]) -> str:
        prompt = "\n".join(message.content for message in messages)
        used_up = False
        for rule in self._rules:
            if not rule.matches(prompt):
                continue
            if rule.remaining is not None:
                if rule.remaining <= 0:
                    used_up = True
                    continue
                rule.remaining -= 1
            return rule.response
        if used_up:
            error(
                "<RRR93310552E>",
                ScriptExhausted(f"Matching rules are used up [endpoint={self.name}]"),
            )
        error(
            "<RRR93310553E>",
            NoMatchingRule(
                f"No rule matches the request [endpoint={self.name}]: {prompt[:200]!r}"
            ),
        )


def scripted_backend(
    script: Union[List[Any], Dict[str, Any]], name: str = "scripted"
) -> ScriptedBackend:
    """Build a ScriptedBackend from a transcript or a rule list

    Args:
        script: Union[List[Any], Dict[str, Any]]
            A list of response strings, a list of rule dicts, or a dict with a
            "transcript" or "rules" key

    Returns:
        ScriptedBackend
    """
    if isinstance(script, dict):
        if "transcript" in script:
            return ScriptedBackend(transcript=script["transcript"], name=name)
        if "rules" in script:
            return ScriptedBackend(rules=script["rules"], name=name)
        error(
            "<RRR93310554E>",
            ValueError("Script dict needs a 'transcript' or 'rules' key"),
        )
    error.type_check("<RRR93310555E>", list, script=script)
    if script and all(isinstance(entry, (dict, ScriptRule)) for entry in script):
        return ScriptedBackend(rules=script, name=name)
    return ScriptedBackend(transcript=script, name=name)
