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
"""Review phase: question planning, sub-query rewriting with temporal anchoring
and the retrieval decision.

The review model answers in a labeled plain-text protocol:

    Query: <rewritten sub-query>
    Answer: <anticipated answer or [need_retrieval]>
    [final]            (optional, this is the last step)

A response made of `[final]` alone ends the chain without a new step.
"""

# Standard
from enum import Enum
from typing import List, Optional
import json
import re

# First Party
from caikit.core.exceptions import error_handler
import alog

# Local
from ...data_model import (
    ModelConfig,
    OriginalQuery,
    ReasoningState,
    ReviewOutcome,
)
from ...exceptions import ModelOutputUnparseable, StateMachineViolation
from ...resources.chat_backend import ChatBackendBase
from ...toolkit.prompt_templates import load_template
from ...toolkit.reasoning_state import history_view, render_history
from ...toolkit.temporal import anchor_query, contains_anchor, month_year, render_anchor
from ...toolkit.trace_utils import TraceRecorder
from ..common import ask, assistant_message, user_message

log = alog.use_channel("REVIEW")
error = error_handler.get(log)

NEED_RETRIEVAL_MARKER = "[need_retrieval]"
FINAL_MARKER = "[final]"

_QUERY_LINE = re.compile(
    r"^[ \t]*(?:query rewriting|rewritten query|query)[ \t]*:[ \t]*(.*)$",
    re.IGNORECASE | re.MULTILINE,
)
_ANSWER_LINE = re.compile(r"^[ \t]*answer[ \t]*:", re.IGNORECASE | re.MULTILINE)
_PLAN_KEY = re.compile(r"(\d+)")
_PLAN_LINE = re.compile(
    r"^[ \t]*step[ \t]*(\d+)[ \t]*[:.)-][ \t]*(.+)$", re.IGNORECASE | re.MULTILINE
)


class ReviewMode(Enum):
    # Rewrite the sub-query and decide on retrieval
    REWRITE = "review"
    # Rewrite the sub-query, always answer from internal knowledge
    NO_RETRIEVAL = "review_no_retrieval"
    # Keep the planned sub-query verbatim
    FIXED_QUERY = "review_fixed_query"


## Planning ####################################################################


def parse_plan(text: str) -> List[str]:
    """Steps of a plan response, [] when none can be found"""
    match = re.search(r"\{.*\}", text, re.DOTALL)
    if match:
        try:
            plan = json.loads(match.group(0))
        except ValueError:
            plan = None
        if isinstance(plan, dict):
            numbered = []
            for key, value in plan.items():
                number = _PLAN_KEY.search(str(key))
                if number and isinstance(value, str) and value.strip():
                    numbered.append((int(number.group(1)), value.strip()))
            if numbered:
                return [step for _, step in sorted(numbered)]
    numbered = [(int(num), step.strip()) for num, step in _PLAN_LINE.findall(text)]
    return [step for _, step in sorted(numbered) if step]


def plan_decomposition(
    query: OriginalQuery,
    backend: ChatBackendBase,
    model_config: ModelConfig,
    recorder: Optional[TraceRecorder] = None,
    prompts_dir: Optional[str] = None,
) -> List[str]:
    """Split the question into advisory single-hop step descriptions

    Returns:
        List[str]
            At least one step description

    Raises:
        ModelOutputUnparseable if no plan can be read after one reprompt
    """
    prompt = load_template("plan", prompts_dir).render(
        question=query.question_text,
        context=query.context or "None",
        anchor=render_anchor(query.temporal_anchor) or "None",
    )
    messages = [user_message(prompt)]
    raw = ask(backend, model_config, messages, recorder, "plan")
    plan = parse_plan(raw)
    if not plan:
        log.warning("<RRR28841107W>", "Plan response unparseable, reprompting")
        messages += [
            assistant_message(raw),
            user_message(load_template("reprompt_plan", prompts_dir).text),
        ]
        raw = ask(backend, model_config, messages, recorder, "plan_reprompt")
        plan = parse_plan(raw)
    if not plan:
        error(
            "<RRR28841108E>",
            ModelOutputUnparseable("Could not read a plan from the model", raw),
        )
    log.debug("Plan with %d steps: %s", len(plan), plan)
    return plan


## Review ######################################################################


def _strip_markers(text: str) -> str:
    for marker in (NEED_RETRIEVAL_MARKER, FINAL_MARKER):
        text = re.sub(re.escape(marker), "", text, flags=re.IGNORECASE)
    return text.strip()


def parse_review_output(text: str) -> ReviewOutcome:
    """Read a review response

    Raises:
        ModelOutputUnparseable when neither a sub-query nor a bare [final]
        can be found
    """
    needs_retrieval = NEED_RETRIEVAL_MARKER in text.lower()
    final = FINAL_MARKER in text.lower()
    query_match = _QUERY_LINE.search(text)
    rewritten = _strip_markers(query_match.group(1)) if query_match else ""

    if not rewritten:
        if final and not needs_retrieval:
            return ReviewOutcome(
                rewritten_query="",
                anticipated_answer="",
                needs_retrieval=False,
                terminate=True,
                raw_model_text=text,
            )
        error(
            "<RRR28841109E>",
            ModelOutputUnparseable("Review response has no Query line", text),
        )

    answer_match = _ANSWER_LINE.search(text, query_match.end())
    answer = _strip_markers(text[answer_match.end() :]) if answer_match else ""
    if needs_retrieval:
        if final:
            log.warning(
                "<RRR28841110W>",
                "Response carries both markers, retrieval takes precedence",
            )
        return ReviewOutcome(
            rewritten_query=rewritten,
            anticipated_answer="",
            needs_retrieval=True,
            terminate=False,
            raw_model_text=text,
        )
    if not answer:
        error(
            "<RRR28841111E>",
            ModelOutputUnparseable("Review response has no answer", text),
        )
    return ReviewOutcome(
        rewritten_query=rewritten,
        anticipated_answer=answer,
        needs_retrieval=False,
        terminate=final,
        raw_model_text=text,
    )


def _with_query(outcome: ReviewOutcome, rewritten_query: str) -> ReviewOutcome:
    return ReviewOutcome(
        rewritten_query=rewritten_query,
        anticipated_answer=outcome.anticipated_answer,
        needs_retrieval=outcome.needs_retrieval,
        terminate=outcome.terminate,
        raw_model_text=outcome.raw_model_text,
    )


def _try_parse(text: str) -> Optional[ReviewOutcome]:
    try:
        return parse_review_output(text)
    except ModelOutputUnparseable:
        return None


def review_step(
    query: OriginalQuery,
    state: ReasoningState,
    plan_hint: Optional[str],
    backend: ChatBackendBase,
    model_config: ModelConfig,
    recorder: Optional[TraceRecorder] = None,
    mode: ReviewMode = ReviewMode.REWRITE,
    prompts_dir: Optional[str] = None,
) -> ReviewOutcome:
    """Produce the next sub-query of the chain and its retrieval decision

    Args:
        query: OriginalQuery
            The question being answered
        state: ReasoningState
            Current, non terminal state
        plan_hint: Optional[str]
            Planned description of this step, if the plan has one
        backend: ChatBackendBase
            Model to ask
        model_config: ModelConfig
            Decoding parameters
        recorder: Optional[TraceRecorder]
            Call log of the run
        mode: ReviewMode
            Regular review or one of the ablated forms

    Returns:
        ReviewOutcome
    """
    if state.terminal:
        error(
            "<RRR28841112E>",
            StateMachineViolation("Cannot review a terminal reasoning state"),
        )
    anchor = query.temporal_anchor
    prompt = load_template(mode.value, prompts_dir).render(
        question=query.question_text,
        context=query.context or "None",
        history=render_history(history_view(state)),
        hint=plan_hint or "None",
        anchor=render_anchor(anchor) or "None",
    )
    messages = [user_message(prompt)]
    raw = ask(backend, model_config, messages, recorder, "review")
    outcome = _try_parse(raw)
    if outcome is None:
        log.warning("<RRR28841113W>", "Review response unparseable, reprompting")
        messages += [
            assistant_message(raw),
            user_message(load_template("reprompt_format", prompts_dir).text),
        ]
        raw = ask(backend, model_config, messages, recorder, "review_reprompt")
        outcome = parse_review_output(raw)

    if mode is ReviewMode.FIXED_QUERY:
        return _with_query(outcome, plan_hint or query.question_text)

    if mode is ReviewMode.NO_RETRIEVAL and outcome.needs_retrieval:
        log.warning(
            "<RRR28841114W>",
            "Retrieval is disabled, answering from internal knowledge",
        )
        outcome = ReviewOutcome(
            rewritten_query=outcome.rewritten_query,
            anticipated_answer="",
            needs_retrieval=False,
            terminate=False,
            raw_model_text=outcome.raw_model_text,
        )

    if anchor and outcome.rewritten_query and not contains_anchor(
        outcome.rewritten_query, anchor
    ):
        messages += [
            assistant_message(raw),
            user_message(
                load_template("reprompt_anchor", prompts_dir).render(
                    anchor=month_year(anchor)
                )
            ),
        ]
        raw = ask(backend, model_config, messages, recorder, "review_anchor")
        retried = _try_parse(raw)
        if retried is not None and retried.rewritten_query:
            if mode is ReviewMode.NO_RETRIEVAL and retried.needs_retrieval:
                retried = ReviewOutcome(
                    rewritten_query=retried.rewritten_query,
                    anticipated_answer="",
                    needs_retrieval=False,
                    terminate=False,
                    raw_model_text=retried.raw_model_text,
                )
            outcome = retried
        if not contains_anchor(outcome.rewritten_query, anchor):
            log.warning(
                "<RRR28841115W>",
                f"Sub-query {outcome.rewritten_query!r} still misses the time "
                "reference, appending it",
            )
            outcome = _with_query(
                outcome, anchor_query(outcome.rewritten_query, anchor)
            )
    return outcome
