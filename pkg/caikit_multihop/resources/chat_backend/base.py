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
"""Common abstractions shared by every chat completion backend"""

# Standard
from abc import ABC, abstractmethod
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Union
import threading

# First Party
from caikit import get_config
from caikit.core.exceptions import error_handler
import alog

# Local
from ...data_model import ChatExchange, ChatMessage, MessageRole, ModelConfig
from ...toolkit.trace_utils import TraceRecorder

log = alog.use_channel("CHATBE")
error = error_handler.get(log)

MessageLike = Union[ChatMessage, Tuple[str, str], Dict[str, str]]

_VALID_ROLES = {role.value for role in MessageRole}


def default_model_config(**overrides: Any) -> ModelConfig:
    """ModelConfig populated from the library config, with overrides"""
    llm_cfg = get_config().llm
    values = {
        "model_name": llm_cfg.model_name,
        "temperature": float(llm_cfg.temperature),
        "top_p": float(llm_cfg.top_p),
        "max_output_tokens": int(llm_cfg.max_output_tokens),
        "endpoint_url": llm_cfg.endpoint_url,
        "api_key_ref": llm_cfg.api_key_env,
        "timeout_seconds": float(llm_cfg.timeout_seconds),
        "deadline_seconds": float(llm_cfg.deadline_seconds),
        "max_retries": int(llm_cfg.max_retries),
        "backoff_seconds": float(llm_cfg.backoff_seconds),
    }
    values.update({key: val for key, val in overrides.items() if val is not None})
    return ModelConfig(**values)


def validate_model_config(config: ModelConfig):
    error.type_check("<RRR31570211E>", ModelConfig, config=config)
    error.value_check(
        "<RRR31570212E>", bool(config.model_name), "model_name must be set"
    )
    error.value_check(
        "<RRR31570213E>",
        0 <= config.temperature <= 2,
        f"temperature must be in [0, 2], got {config.temperature}",
    )
    error.value_check(
        "<RRR31570214E>",
        0 < config.top_p <= 1,
        f"top_p must be in (0, 1], got {config.top_p}",
    )
    error.value_check(
        "<RRR31570215E>",
        config.max_output_tokens >= 1,
        "max_output_tokens must be strictly positive",
    )
    error.value_check(
        "<RRR31570216E>", config.max_retries >= 1, "max_retries must be >= 1"
    )


def to_messages(messages: Iterable[MessageLike]) -> List[ChatMessage]:
    """Accept ChatMessages, (role, content) pairs or {"role", "content"} dicts"""
    converted = []
    for message in messages:
        if isinstance(message, ChatMessage):
            converted.append(message)
        elif isinstance(message, dict):
            converted.append(
                ChatMessage(role=message["role"], content=message["content"])
            )
        else:
            role, content = message
            converted.append(ChatMessage(role=role, content=content))
    return converted


def validate_messages(messages: Sequence[ChatMessage]):
    error.value_check("<RRR31570217E>", len(messages) > 0, "messages are empty")
    for message in messages:
        error.value_check(
            "<RRR31570218E>",
            message.role in _VALID_ROLES,
            f"Invalid message role {message.role!r}",
        )
        error.type_check("<RRR31570219E>", str, content=message.content)
    error.value_check(
        "<RRR31570220E>",
        messages[-1].role in (MessageRole.USER.value, MessageRole.SYSTEM.value),
        "The last request message must come from the user or the system",
    )


class ChatBackendBase(ABC):
    """Uniform chat completion interface. Implementations must be safe to call
    from several threads at once.
    """

    def __init__(self):
        self._call_count = 0
        self._count_lock = threading.Lock()

    ## Abstract Interface ######################################################

    @property
    @abstractmethod
    def endpoint(self) -> str:
        """Human readable name of what this backend talks to"""

    @abstractmethod
    def _complete(
        self, config: ModelConfig, messages: List[ChatMessage]
    ) -> ChatExchange:
        """Produce the response for one validated request"""

    ## Shared Implementation ###################################################

    @property
    def ordered_replay(self) -> bool:
        """True when responses depend on the order requests arrive in. Requests
        from different questions must then not interleave.
        """
        return False

    @property
    def call_count(self) -> int:
        """Number of requests this backend answered itself"""
        return self._call_count

    def complete(
        self,
        config: ModelConfig,
        messages: Iterable[MessageLike],
        *,
        recorder: Optional[TraceRecorder] = None,
        purpose: str = "chat",
    ) -> ChatExchange:
        """Run one chat completion

        Args:
            config: ModelConfig
                Model and decoding parameters
            messages: Iterable[MessageLike]
                Ordered conversation, the last message from user or system
            recorder: Optional[TraceRecorder]
                Call log of the pipeline run issuing this request
            purpose: str
                What the call is for (plan, review, refine, ...), kept in the log

        Returns:
            ChatExchange
                The request together with the response text
        """
        validate_model_config(config)
        messages = to_messages(messages)
        validate_messages(messages)
        with self._count_lock:
            self._call_count += 1
        exchange = self._complete(config, messages)
        if recorder is not None:
            recorder.record_model_call(purpose, messages, exchange.response_text)
        return exchange
