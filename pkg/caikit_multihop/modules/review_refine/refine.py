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
"""Refine phase: per-step answer refinement and the final aggregation"""

# Standard
from typing import List, Optional, Sequence

# First Party
from caikit.core.exceptions import error_handler
import alog

# Local
from ...data_model import AggregationInput, Document, ModelConfig
from ...exceptions import AggregationEmpty, RefineEmpty
from ...resources.chat_backend import ChatBackendBase
from ...toolkit.prompt_templates import load_template
from ...toolkit.reasoning_state import HistoryEntry, render_history
from ...toolkit.temporal import render_anchor
from ...toolkit.trace_utils import TraceRecorder
from ..common import ask, strip_label, user_message
from ..retrieval import snippet

log = alog.use_channel("REFINE")
error = error_handler.get(log)


def refine_step_answer(
    step_query: str,
    anticipated: str,
    documents: Sequence[Document],
    history: List[HistoryEntry],
    backend: ChatBackendBase,
    model_config: ModelConfig,
    recorder: Optional[TraceRecorder] = None,
    snippet_max_chars: Optional[int] = None,
    prompts_dir: Optional[str] = None,
) -> str:
    """Answer one sub-query, grounded in the documents when there are any

    Without documents the prompt carries no context block and the draft answer
    is only verified against internal knowledge.

    Raises:
        RefineEmpty if the model returns nothing
    """
    error.type_check("<RRR51736620E>", str, step_query=step_query)
    error.value_check(
        "<RRR51736621E>", step_query.strip() != "", "step_query must not be empty"
    )
    values = {
        "query": step_query,
        "history": render_history(history),
        "anticipated": anticipated or "None",
    }
    if documents:
        template = load_template("refine_with_context", prompts_dir)
        values["context"] = snippet(documents, snippet_max_chars)
    else:
        template = load_template("refine_internal", prompts_dir)
    raw = ask(
        backend,
        model_config,
        [user_message(template.render(**values))],
        recorder,
        "refine",
    )
    answer = strip_label(raw, "Refined Answer")
    if not answer:
        error(
            "<RRR51736622E>",
            RefineEmpty(f"Empty refined answer for sub-query {step_query!r}"),
        )
    return answer


def render_sub_answers(aggregation_input: AggregationInput) -> str:
    return "\n".join(
        f"{number}. Query: {pair.query}\n   Answer: {pair.answer}"
        for number, pair in enumerate(aggregation_input.sub_answers, start=1)
    )


def aggregate(
    aggregation_input: AggregationInput,
    backend: ChatBackendBase,
    model_config: ModelConfig,
    recorder: Optional[TraceRecorder] = None,
    prompts_dir: Optional[str] = None,
) -> str:
    """Fuse all sub-answers, in step order, into the final answer

    Raises:
        AggregationEmpty if the model returns nothing
    """
    error.type_check(
        "<RRR51736623E>", AggregationInput, aggregation_input=aggregation_input
    )
    error.value_check(
        "<RRR51736624E>",
        len(aggregation_input.sub_answers or []) > 0,
        "Aggregation needs at least one sub-answer",
    )
    prompt = load_template("aggregate", prompts_dir).render(
        question=aggregation_input.original_question,
        anchor=render_anchor(aggregation_input.temporal_anchor) or "None",
        sub_answers=render_sub_answers(aggregation_input),
    )
    raw = ask(backend, model_config, [user_message(prompt)], recorder, "aggregate")
    answer = strip_label(raw, "Aggregated Answer")
    if not answer:
        error("<RRR51736625E>", AggregationEmpty("Empty aggregated answer"))
    return answer
