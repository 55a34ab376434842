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
"""State machine over the reasoning chain of one question.

States are never modified in place: every transition builds a new
ReasoningState, so a state can be shared freely between threads.
"""

# Standard
from typing import List, NamedTuple

# First Party
from caikit.core.exceptions import error_handler
import alog

# Local
from ..data_model import OriginalQuery, ReasoningState, SubQueryStep
from ..exceptions import StateMachineViolation, StepOrderingError
from .temporal import parse_anchor

log = alog.use_channel("RSTATE")
error = error_handler.get(log)


class HistoryEntry(NamedTuple):
    """One completed step as seen by later prompts"""

    sub_query: str
    anticipated_answer: str
    refined_answer: str

    @property
    def answer(self) -> str:
        """The refined answer when there is one, else the anticipated one"""
        return self.refined_answer or self.anticipated_answer


def validate_query(query: OriginalQuery):
    """Check the invariants of an OriginalQuery

    Raises:
        TypeError / ValueError on invalid queries
    """
    error.type_check("<RRR20918374E>", OriginalQuery, query=query)
    error.type_check("<RRR20918375E>", str, question_text=query.question_text)
    error.value_check(
        "<RRR20918376E>",
        query.question_text.strip() != "",
        "question_text must not be empty",
    )
    parse_anchor(query.temporal_anchor)


def validate_step(step: SubQueryStep):
    """Check the invariants of a finalized SubQueryStep"""
    error.type_check("<RRR20918377E>", SubQueryStep, step=step)
    error.value_check(
        "<RRR20918378E>",
        step.needs_retrieval or not step.documents,
        f"step {step.index} carries documents without a retrieval decision",
    )
    if not (step.refined_answer or "").strip():
        error(
            "<RRR20918379E>",
            StateMachineViolation(f"step {step.index} is not finalized"),
        )


def initial_state(query: OriginalQuery, step_budget: int) -> ReasoningState:
    """Build s0 from the original query alone

    Args:
        query: OriginalQuery
            The question being answered, stored verbatim
        step_budget: int
            Maximum number of steps the chain may take

    Returns:
        ReasoningState
            State without completed steps that is not terminal
    """
    validate_query(query)
    error.type_check("<RRR20918380E>", int, step_budget=step_budget)
    error.value_check(
        "<RRR20918381E>",
        step_budget >= 1,
        f"step_budget must be >= 1, got {step_budget}",
    )
    return ReasoningState(
        query=query, completed_steps=[], terminal=False, step_budget=step_budget
    )


def transition(state: ReasoningState, step: SubQueryStep) -> ReasoningState:
    """Append a finalized step and return the next state

    The returned state is terminal when the budget is used up or when the step
    carries the termination marker.

    Raises:
        StateMachineViolation if the state is terminal or the step unfinished
        StepOrderingError if the step index is not the next one
    """
    if state.terminal:
        error(
            "<RRR20918382E>",
            StateMachineViolation(
                f"cannot add step {step.index} to a terminal reasoning state"
            ),
        )
    expected = len(state.completed_steps) + 1
    if step.index != expected:
        error(
            "<RRR20918383E>",
            StepOrderingError(f"expected step index {expected}, got {step.index}"),
        )
    validate_step(step)

    completed = list(state.completed_steps) + [step]
    terminal = len(completed) >= state.step_budget or bool(step.terminate)
    log.debug2("Step %d appended, terminal=%s", step.index, terminal)
    return ReasoningState(
        query=state.query,
        completed_steps=completed,
        terminal=terminal,
        step_budget=state.step_budget,
    )


def close(state: ReasoningState) -> ReasoningState:
    """Mark the chain finished without adding a step"""
    if state.terminal:
        return state
    return ReasoningState(
        query=state.query,
        completed_steps=list(state.completed_steps),
        terminal=True,
        step_budget=state.step_budget,
    )


def history_view(state: ReasoningState) -> List[HistoryEntry]:
    """History H_i of the state in step order"""
    return [
        HistoryEntry(
            sub_query=step.rewritten_query,
            anticipated_answer=step.anticipated_answer or "",
            refined_answer=step.refined_answer or "",
        )
        for step in state.completed_steps
    ]


def render_history(entries: List[HistoryEntry]) -> str:
    """Numbered history block for prompts, "None" when empty"""
    if not entries:
        return "None"
    return "\n".join(
        f"{number}. Query: {entry.sub_query}\n   Answer: {entry.answer}"
        for number, entry in enumerate(entries, start=1)
    )
