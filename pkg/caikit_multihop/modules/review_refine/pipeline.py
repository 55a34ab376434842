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
"""End to end review-then-refine loop over one question"""

# Standard
from typing import List, NamedTuple, Optional

# First Party
from caikit.core.exceptions import error_handler
import alog

# Local
from ...data_model import (
    AggregationInput,
    OriginalQuery,
    PipelineTrace,
    RunConfig,
    SubAnswer,
    SubQueryStep,
)
from ...exceptions import AggregationEmpty, StepFailed
from ...resources.chat_backend import ChatBackendBase
from ...toolkit.reasoning_state import close, history_view, initial_state, transition
from ...toolkit.trace_utils import TraceRecorder, now_rfc3339
from ..common import build_trace
from ..retrieval import Retriever, retrieve, validate_retriever_config
from .refine import aggregate, refine_step_answer
from .review import ReviewMode, plan_decomposition, review_step

log = alog.use_channel("RRRPIPE")
error = error_handler.get(log)

# Step index reported for failures outside of a step (plan, aggregation)
OUTSIDE_STEP = 0


class PipelineSwitches(NamedTuple):
    """Parts of the pipeline an ablation can turn off"""

    decompose: bool = True
    rewrite: bool = True
    retrieval: bool = True


def _review_mode(switches: PipelineSwitches) -> ReviewMode:
    if not switches.rewrite:
        return ReviewMode.FIXED_QUERY
    if not switches.retrieval:
        return ReviewMode.NO_RETRIEVAL
    return ReviewMode.REWRITE


def run_review_refine(
    query: OriginalQuery,
    backend: ChatBackendBase,
    retriever: Optional[Retriever],
    config: RunConfig,
    switches: Optional[PipelineSwitches] = None,
    variant: str = "rrr_full",
    prompts_dir: Optional[str] = None,
) -> PipelineTrace:
    """Answer one question step by step

    Each step is reviewed, retrieves only when the review asked for it, is
    refined and appended to the reasoning state. The terminal state's steps are
    aggregated into the final answer.

    Args:
        query: OriginalQuery
            Question to answer
        backend: ChatBackendBase
            Model backend
        retriever: Optional[Retriever]
            Index or web adapter, may be None when retrieval is switched off
        config: RunConfig
            Model, retriever and budget settings
        switches: Optional[PipelineSwitches]
            Ablation switches, everything on by default
        variant: str
            Name recorded in the trace

    Returns:
        PipelineTrace

    Raises:
        StepFailed carrying the partial trace when a step cannot complete
    """
    switches = switches or PipelineSwitches()
    error.value_check(
        "<RRR63390851E>",
        config.step_budget >= 1,
        f"step_budget must be >= 1, got {config.step_budget}",
    )
    validate_retriever_config(config.retriever)
    error.value_check(
        "<RRR63390852E>",
        retriever is not None or not switches.retrieval,
        "A retriever is required unless retrieval is switched off",
    )

    recorder = TraceRecorder()
    started_at = now_rfc3339()
    model_config = config.model
    mode = _review_mode(switches)
    state = initial_state(query, config.step_budget if switches.decompose else 1)
    plan: List[str] = []

    def fail(step_index: int, cause: Exception):
        partial = build_trace(
            query,
            state.completed_steps,
            "",
            config,
            variant,
            recorder,
            started_at,
            plan=plan,
            failure=cause,
        )
        log.warning(
            "<RRR63390853W>",
            f"{variant} aborted at step {step_index} for "
            f"{query.question_id or query.question_text!r}: {cause}",
        )
        error("<RRR63390854E>", StepFailed(step_index, cause, partial))

    if switches.decompose:
        try:
            plan = plan_decomposition(
                query, backend, model_config, recorder, prompts_dir
            )
        except Exception as err:  # pylint: disable=broad-exception-caught
            fail(OUTSIDE_STEP, err)

    while not state.terminal:
        index = len(state.completed_steps) + 1
        hint = plan[index - 1] if index <= len(plan) else None
        if mode is ReviewMode.FIXED_QUERY and hint is None and plan:
            state = close(state)
            break
        try:
            with recorder.step(index):
                outcome = review_step(
                    query,
                    state,
                    hint,
                    backend,
                    model_config,
                    recorder,
                    mode,
                    prompts_dir,
                )
                if not outcome.rewritten_query:
                    if not state.completed_steps:
                        raise AggregationEmpty(
                            "Review ended the chain before the first step"
                        )
                    state = close(state)
                    break
                documents = retrieve(
                    retriever,
                    outcome.rewritten_query,
                    outcome.needs_retrieval,
                    config.retriever,
                    recorder,
                )
                refined = refine_step_answer(
                    outcome.rewritten_query,
                    outcome.anticipated_answer,
                    documents,
                    history_view(state),
                    backend,
                    model_config,
                    recorder,
                    config.snippet_max_chars,
                    prompts_dir,
                )
            terminate = outcome.terminate
            if mode is ReviewMode.FIXED_QUERY:
                terminate = index >= len(plan)
            step = SubQueryStep(
                index=index,
                rewritten_query=outcome.rewritten_query,
                anticipated_answer=outcome.anticipated_answer,
                needs_retrieval=outcome.needs_retrieval,
                documents=documents,
                refined_answer=refined,
                terminate=terminate,
            )
        except Exception as err:  # pylint: disable=broad-exception-caught
            fail(index, err)
        state = transition(state, step)

    try:
        final_answer = aggregate(
            AggregationInput(
                original_question=query.question_text,
                sub_answers=[
                    SubAnswer(query=entry.sub_query, answer=entry.answer)
                    for entry in history_view(state)
                ],
                temporal_anchor=query.temporal_anchor,
            ),
            backend,
            model_config,
            recorder,
            prompts_dir,
        )
    except Exception as err:  # pylint: disable=broad-exception-caught
        fail(OUTSIDE_STEP, err)

    log.debug(
        "%s finished %s in %d steps",
        variant,
        query.question_id or query.question_text,
        len(state.completed_steps),
    )
    return build_trace(
        query,
        state.completed_steps,
        final_answer,
        config,
        variant,
        recorder,
        started_at,
        plan=plan,
    )
