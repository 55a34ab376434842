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
"""Model based grading for free-form answers"""

# Standard
from typing import Optional
import re

# First Party
import alog

# Local
from ...data_model import EvalRecord, ModelConfig
from ...exceptions import MultihopError
from ...resources.chat_backend import ChatBackendBase
from ...toolkit.prompt_templates import load_template
from ..common import ask, user_message

log = alog.use_channel("JUDGE")

# Verdict is the first word of the response
_VERDICT = re.compile(r"\W*(incorrect|correct)\b", re.IGNORECASE)


class LLMJudge:
    """Asks the model whether a prediction matches the gold answers"""

    def __init__(
        self,
        backend: ChatBackendBase,
        model_config: ModelConfig,
        prompts_dir: Optional[str] = None,
    ):
        self.backend = backend
        self.model_config = model_config
        self.prompts_dir = prompts_dir

    def __call__(self, record: EvalRecord, prediction: str) -> bool:
        if not prediction.strip():
            return False
        prompt = load_template("judge", self.prompts_dir).render(
            question=record.question,
            gold="\n".join(f"- {answer}" for answer in record.gold_answers),
            prediction=prediction,
        )
        try:
            raw = ask(
                self.backend,
                self.model_config,
                [user_message(prompt)],
                None,
                "judge",
            )
        except MultihopError as err:
            log.warning(
                "<RRR60395522W>",
                f"Judge call failed for {record.record_id}, scoring incorrect: {err}",
            )
            return False
        verdict = _VERDICT.match(raw)
        if verdict is None:
            log.warning(
                "<RRR60395521W>",
                f"Unreadable verdict for {record.record_id}, scoring incorrect",
            )
            return False
        return verdict.group(1).lower() == "correct"
