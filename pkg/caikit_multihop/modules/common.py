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
"""Pieces shared by the review-then-refine pipeline and the baselines"""

# Standard
from typing import List, Optional
import re

# First Party
from caikit.core.exceptions import error_handler
import alog

# Local
from ..data_model import (
    ChatMessage,
    MessageRole,
    ModelConfig,
    OriginalQuery,
    PipelineTrace,
    RunConfig,
    SubQueryStep,
    TraceStatus,
)
from ..resources.chat_backend import ChatBackendBase
from ..toolkit.prompt_templates import prompt_set_digest
from ..toolkit.trace_utils import TraceRecorder, digest, now_rfc3339

log = alog.use_channel("PIPECOMMON")
error = error_handler.get(log)


def user_message(content: str) -> ChatMessage:
    return ChatMessage(role=MessageRole.USER.value, content=content)


def assistant_message(content: str) -> ChatMessage:
    return ChatMessage(role=MessageRole.ASSISTANT.value, content=content)


def ask(
    backend: ChatBackendBase,
    model_config: ModelConfig,
    messages: List[ChatMessage],
    recorder: Optional[TraceRecorder],
    purpose: str,
) -> str:
    """One model call, returning the response text"""
    with alog.ContextTimer(log.trace, f"{purpose} call duration: "):
        exchange = backend.complete(
            model_config, messages, recorder=recorder, purpose=purpose
        )
    return exchange.response_text


def strip_label(text: str, label: str) -> str:
    """Drop a leading `<label>:` the model may have echoed from the prompt"""
    text = text.strip()
    return re.sub(rf"^{re.escape(label)}\s*:\s*", "", text, flags=re.IGNORECASE)


def model_config_digest(config: RunConfig, variant: str) -> str:
    """Digest over everything that shapes the model requests of a run. The
    prompt file set is part of it, the API key never is.
    """
    return digest(
        {
            "model": {
                "model_name": config.model.model_name,
                "temperature": config.model.temperature,
                "top_p": config.model.top_p,
                "max_output_tokens": config.model.max_output_tokens,
            },
            "retriever": {
                "top_k": config.retriever.top_k,
                "min_score": config.retriever.min_score,
            },
            "step_budget": config.step_budget,
            "variant": variant,
            "prompt_set": prompt_set_digest(),
        }
    )


def build_trace(
    query: OriginalQuery,
    steps: List[SubQueryStep],
    final_answer: str,
    config: RunConfig,
    variant: str,
    recorder: TraceRecorder,
    started_at: str,
    plan: Optional[List[str]] = None,
    failure: Optional[Exception] = None,
) -> PipelineTrace:
    status = TraceStatus.ABORTED if failure is not None else TraceStatus.COMPLETED
    return PipelineTrace(
        query=query,
        steps=list(steps),
        final_answer=final_answer,
        model_config_digest=model_config_digest(config, variant),
        timing=list(recorder.timing),
        backend_call_log=list(recorder.calls),
        variant=variant,
        plan=list(plan or []),
        status=status.value,
        error="" if failure is None else str(failure),
        started_at=started_at,
        finished_at=now_rfc3339(),
    )
