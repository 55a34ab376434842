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
"""Control flow of every registered variant.

Baselines record their work in the same PipelineTrace schema as the main
pipeline: every model-visible sub-question becomes a SubQueryStep built through
the reasoning state machine, so retrieval accounting holds for all variants.
"""

# Standard
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union
import re

# Third Party
from tqdm import tqdm

# First Party
from caikit import get_config
from caikit.core.exceptions import error_handler
import alog

# Local
from ...data_model import (
    ChatMessage,
    Document,
    EvalRecord,
    OriginalQuery,
    PipelineTrace,
    RunConfig,
    SubQueryStep,
)
from ...exceptions import (
    LoopLimitExceeded,
    ModelOutputUnparseable,
    RefineEmpty,
    StepFailed,
)
from ...resources.chat_backend import ChatBackendBase
from ...toolkit.prompt_templates import PromptTemplate, load_template
from ...toolkit.reasoning_state import initial_state, transition
from ...toolkit.trace_utils import TraceRecorder, now_rfc3339
from ..common import ask, assistant_message, build_trace, strip_label, user_message
from ..retrieval import Retriever, retrieve, snippet, validate_retriever_config
from ..review_refine import PipelineSwitches, run_review_refine
from .variants import PipelineVariant, VariantName, get_variant

log = alog.use_channel("BASELINES")
error = error_handler.get(log)

_SWITCHES = {
    VariantName.RRR_FULL.value: PipelineSwitches(),
    VariantName.RRR_NO_DECOMPOSE.value: PipelineSwitches(decompose=False),
    VariantName.RRR_NO_RETRIEVAL.value: PipelineSwitches(retrieval=False),
    VariantName.RRR_NO_REWRITE.value: PipelineSwitches(rewrite=False),
}

_FINAL_CONTENT = re.compile(
    r"\[Final Content\][ \t]*:?\s*(.*)", re.IGNORECASE | re.DOTALL
)
_CHAIN_ENTRY = re.compile(
    r"\[(Query|Answer)[ \t]*(\d+)\][ \t]*:?[ \t]*(.*?)"
    r"(?=\n\s*\[(?:Query|Answer)[ \t]*\d+\]|\n\s*\[Final Content\]|\Z)",
    re.IGNORECASE | re.DOTALL,
)
_OBSERVATION = re.compile(r"^[ \t]*Observation[ \t]*:", re.IGNORECASE | re.MULTILINE)
_REACT_FINAL = re.compile(r"Final Answer[ \t]*:\s*(.*)", re.IGNORECASE | re.DOTALL)
_REACT_ACTION = re.compile(
    r"^[ \t]*Action[ \t]*:[ \t]*(.+?)[ \t]*$", re.IGNORECASE | re.MULTILINE
)
_REACT_INPUT = re.compile(
    r"^[ \t]*Action Input[ \t]*:[ \t]*(.+?)[ \t]*$", re.IGNORECASE | re.MULTILINE
)
_FOLLOW_UP = re.compile(
    r"^[ \t]*Follow up[ \t]*:[ \t]*(.+?)[ \t]*$", re.IGNORECASE | re.MULTILINE
)
_INTERMEDIATE = re.compile(
    r"^[ \t]*Intermediate answer[ \t]*:", re.IGNORECASE | re.MULTILINE
)
_SO_FINAL = re.compile(r"So the final answer is[ \t]*:?[ \t]*(.+)", re.IGNORECASE)

_SEARCH = "search"
_SKIP = "skip"


def max_iterations() -> int:
    """Loop cap of the iterative baselines"""
    return int(get_config().pipeline.react_max_iterations)


class BaselineRun:
    """Mutable bookkeeping of one baseline run over one question"""

    def __init__(
        self,
        variant: PipelineVariant,
        query: OriginalQuery,
        backend: ChatBackendBase,
        retriever: Optional[Retriever],
        config: RunConfig,
        max_steps: int,
        prompts_dir: Optional[str] = None,
    ):
        self.variant = variant
        self.query = query
        self.backend = backend
        self.retriever = retriever
        self.config = config
        self.max_steps = max_steps
        self.prompts_dir = prompts_dir
        self.recorder = TraceRecorder()
        self.started_at = now_rfc3339()
        self.state = initial_state(query, max_steps)

    @property
    def step_count(self) -> int:
        return len(self.state.completed_steps)

    def template(self, name: str) -> PromptTemplate:
        return load_template(name, self.prompts_dir)

    def ask(self, messages: List[ChatMessage], purpose: str) -> str:
        return ask(self.backend, self.config.model, messages, self.recorder, purpose)

    def retrieve(self, query: str) -> List[Document]:
        return retrieve(
            self.retriever, query, True, self.config.retriever, self.recorder
        )

    def context(self, documents: Sequence[Document]) -> str:
        return snippet(documents, self.config.snippet_max_chars)

    def add_step(
        self,
        sub_query: str,
        answer: str,
        documents: List[Document],
        needs_retrieval: bool,
        anticipated: str = "",
        terminate: bool = False,
    ):
        step = SubQueryStep(
            index=self.step_count + 1,
            rewritten_query=sub_query,
            anticipated_answer=anticipated,
            needs_retrieval=needs_retrieval,
            documents=list(documents),
            refined_answer=answer,
            terminate=terminate,
        )
        self.state = transition(self.state, step)

    def trace(
        self, final_answer: str, failure: Optional[Exception] = None
    ) -> PipelineTrace:
        return build_trace(
            self.query,
            self.state.completed_steps,
            final_answer,
            self.config,
            self.variant.name,
            self.recorder,
            self.started_at,
            failure=failure,
        )


def final_content(text: str) -> Optional[str]:
    """Text following [Final Content], None without the marker"""
    match = _FINAL_CONTENT.search(text)
    if match is None:
        return None
    return match.group(1).strip()


def parse_chain(text: str) -> Tuple[List[Tuple[str, str]], Optional[str]]:
    """[Query i] / [Answer i] pairs in index order and the final content"""
    queries: Dict[int, str] = {}
    answers: Dict[int, str] = {}
    for kind, number, body in _CHAIN_ENTRY.findall(text):
        target = queries if kind.lower() == "query" else answers
        target.setdefault(int(number), body.strip())
    pairs = [
        (queries[number], answers.get(number, ""))
        for number in sorted(queries)
        if queries[number]
    ]
    return pairs, final_content(text)


def parse_react(text: str) -> Optional[Tuple[str, Union[str, Tuple[str, str]], str]]:
    """Read one ReAct turn

    Returns:
        ("final", answer, kept_text), ("action", (action, input), kept_text) or
        None when the turn has neither. Anything after an invented Observation
        line is dropped.
    """
    kept = _OBSERVATION.split(text, maxsplit=1)[0].rstrip()
    final = _REACT_FINAL.search(kept)
    if final and final.group(1).strip():
        return "final", final.group(1).strip(), kept
    action = _REACT_ACTION.search(kept)
    action_input = _REACT_INPUT.search(kept)
    if action is None or action_input is None:
        return None
    name = action.group(1).strip().strip("[]").strip().lower()
    if name not in (_SEARCH, _SKIP):
        return None
    return "action", (name, action_input.group(1).strip()), kept


## Variant control flows #######################################################


def _single_call(run: BaselineRun) -> str:
    """Optionally retrieve for the question, then answer with one call"""
    name = run.variant.name
    question = run.query.question_text
    with run.recorder.step(1):
        documents = run.retrieve(question) if run.variant.uses_retrieval else []
        context = run.context(documents) or "None"
        prompt = run.template(name).render(
            q=question, context=context, passages=context
        )
        raw = run.ask([user_message(prompt)], name)
    if name == VariantName.CHAIN_OF_NOTE.value:
        answer = final_content(raw) or raw.strip()
    else:
        answer = strip_label(raw, "Answer")
    if not answer:
        raise ModelOutputUnparseable(f"{name} returned an empty answer", raw)
    run.add_step(
        question, answer, documents, run.variant.uses_retrieval, terminate=True
    )
    return answer


def _reprompt(
    run: BaselineRun,
    messages: List[ChatMessage],
    raw: str,
    template_name: str,
    purpose: str,
) -> Tuple[List[ChatMessage], str]:
    log.warning(
        "<RRR09182736W>", f"{run.variant.name} response unparseable, reprompting"
    )
    messages = messages + [
        assistant_message(raw),
        user_message(run.template(template_name).text),
    ]
    return messages, run.ask(messages, purpose)


def _react(run: BaselineRun) -> str:
    """Thought / Action / Observation loop. Search goes to the retriever, Skip
    answers the action input from internal knowledge.
    """
    messages = [user_message(run.template("react").render(q=run.query.question_text))]
    for _ in range(run.max_steps):
        raw = run.ask(messages, "react")
        parsed = parse_react(raw)
        if parsed is None:
            messages, raw = _reprompt(
                run, messages, raw, "reprompt_react", "react_reprompt"
            )
            parsed = parse_react(raw)
            if parsed is None:
                raise ModelOutputUnparseable(
                    "ReAct response has neither an action nor a final answer", raw
                )
        kind, value, kept = parsed
        if kind == "final":
            return value

        action, action_input = value
        index = run.step_count + 1
        with run.recorder.step(index):
            if action == _SEARCH:
                documents = run.retrieve(action_input)
                observation = run.context(documents) or "No results found."
            else:
                documents = []
                skip_prompt = run.template("vanilla").render(q=action_input)
                observation = strip_label(
                    run.ask([user_message(skip_prompt)], "react_skip"), "Answer"
                ) or "No answer."
        run.add_step(action_input, observation, documents, action == _SEARCH)
        messages = messages + [
            assistant_message(kept),
            user_message(f"Observation: {observation}"),
        ]
    raise LoopLimitExceeded(
        f"ReAct gave no final answer within {run.max_steps} iterations"
    )


def _self_ask(run: BaselineRun) -> str:
    """Follow-up questions answered one by one until the model states the
    final answer
    """
    prompt = run.template("self_ask").render(q=run.query.question_text)
    messages = [user_message(prompt)]
    reprompted = False
    while True:
        raw = run.ask(messages, "self_ask")
        kept = _INTERMEDIATE.split(raw, maxsplit=1)[0].rstrip()
        follow_up = _FOLLOW_UP.search(kept)
        final = _SO_FINAL.search(kept)
        if follow_up and (final is None or follow_up.start() < final.start()):
            if run.state.terminal:
                raise LoopLimitExceeded(
                    f"Self-Ask gave no final answer within {run.max_steps} follow ups"
                )
            sub_question = follow_up.group(1)
            index = run.step_count + 1
            with run.recorder.step(index):
                if run.variant.uses_retrieval:
                    documents = run.retrieve(sub_question)
                    prompt = run.template("vanilla_with_context").render(
                        q=sub_question, context=run.context(documents) or "None"
                    )
                else:
                    documents = []
                    prompt = run.template("vanilla").render(q=sub_question)
                answer = strip_label(
                    run.ask([user_message(prompt)], "self_ask_answer"), "Answer"
                )
            if not answer:
                raise RefineEmpty(f"Empty intermediate answer for {sub_question!r}")
            run.add_step(sub_question, answer, documents, run.variant.uses_retrieval)
            messages = messages + [
                assistant_message(kept[: follow_up.end()]),
                user_message(f"Intermediate answer: {answer}"),
            ]
            continue
        if final and final.group(1).strip():
            return final.group(1).strip()
        if reprompted:
            raise ModelOutputUnparseable(
                "Self-Ask response has neither a follow up nor a final answer", raw
            )
        reprompted = True
        messages = messages + [
            assistant_message(raw),
            user_message(run.template("reprompt_self_ask").text),
        ]


def _searchain(run: BaselineRun) -> str:
    """Generate the whole [Query]/[Answer] chain at once. With retrieval every
    query is searched and the chain is regenerated once against the references.
    """
    prompt = run.template("searchain").render(q=run.query.question_text)
    messages = [user_message(prompt)]
    raw = run.ask(messages, "searchain")
    pairs, final = parse_chain(raw)
    if not pairs or final is None:
        messages, raw = _reprompt(
            run, messages, raw, "reprompt_searchain", "searchain_reprompt"
        )
        pairs, final = parse_chain(raw)
        if not pairs or final is None:
            raise ModelOutputUnparseable("Could not read a SearChain chain", raw)
    if len(pairs) > run.max_steps:
        log.warning(
            "<RRR09182737W>",
            f"Chain of {len(pairs)} queries cut to {run.max_steps}",
        )
        pairs = pairs[: run.max_steps]

    documents_per_step: List[List[Document]] = [[] for _ in pairs]
    verified: Dict[int, str] = {}
    if run.variant.uses_retrieval:
        for index, (sub_query, _) in enumerate(pairs, start=1):
            with run.recorder.step(index):
                documents_per_step[index - 1] = run.retrieve(sub_query)
        references = "\n\n".join(
            f"[Query {index}]: {sub_query}\n"
            f"{run.context(documents) or 'No results found.'}"
            for index, ((sub_query, _), documents) in enumerate(
                zip(pairs, documents_per_step), start=1
            )
        )
        verify_prompt = run.template("searchain_verify").render(
            chain=raw, references=references
        )
        verify_raw = run.ask([user_message(verify_prompt)], "searchain_verify")
        verified_pairs, verified_final = parse_chain(verify_raw)
        verified = {
            index: answer
            for index, (_, answer) in enumerate(verified_pairs, start=1)
            if answer
        }
        if verified_final:
            final = verified_final
        else:
            log.warning(
                "<RRR09182738W>",
                "Verification gave no [Final Content], keeping the chain's",
            )

    for index, ((sub_query, answer), documents) in enumerate(
        zip(pairs, documents_per_step), start=1
    ):
        run.add_step(
            sub_query,
            verified.get(index) or answer or "No answer given.",
            documents,
            run.variant.uses_retrieval,
            anticipated=answer,
        )
    if not final:
        raise ModelOutputUnparseable("SearChain final content is empty", raw)
    return final


_RUNNERS: Dict[str, Callable[[BaselineRun], str]] = {
    VariantName.VANILLA.value: _single_call,
    VariantName.VANILLA_WITH_CONTEXT.value: _single_call,
    VariantName.COT.value: _single_call,
    VariantName.FRESHPROMPT.value: _single_call,
    VariantName.CHAIN_OF_NOTE.value: _single_call,
    VariantName.REACT.value: _react,
    VariantName.SELF_ASK.value: _self_ask,
    VariantName.SELF_ASK_NO_RETRIEVAL.value: _self_ask,
    VariantName.SEARCHAIN.value: _searchain,
    VariantName.SEARCHAIN_NO_RETRIEVAL.value: _searchain,
}


## Public interface ############################################################


def run_variant(
    variant: Union[str, PipelineVariant],
    query: OriginalQuery,
    backend: ChatBackendBase,
    retriever: Optional[Retriever],
    config: RunConfig,
    prompts_dir: Optional[str] = None,
) -> PipelineTrace:
    """Answer one question with the given variant

    Failures after the question started are not raised: the returned trace is
    marked aborted and keeps everything recorded up to the failure.

    Args:
        variant: Union[str, PipelineVariant]
            Registered variant or its name
        query: OriginalQuery
            Question to answer
        backend: ChatBackendBase
            Model backend
        retriever: Optional[Retriever]
            Required by variants that retrieve, ignored by the others
        config: RunConfig
            Run settings

    Returns:
        PipelineTrace
    """
    if isinstance(variant, str):
        variant = get_variant(variant)
    validate_retriever_config(config.retriever)
    error.value_check(
        "<RRR09182739E>",
        retriever is not None or not variant.uses_retrieval,
        f"Variant {variant.name} needs a retriever",
    )
    retriever = retriever if variant.uses_retrieval else None

    if variant.name in _SWITCHES:
        try:
            return run_review_refine(
                query,
                backend,
                retriever,
                config,
                switches=_SWITCHES[variant.name],
                variant=variant.name,
                prompts_dir=prompts_dir,
            )
        except StepFailed as err:
            return err.partial_trace

    run = BaselineRun(
        variant, query, backend, retriever, config, max_iterations(), prompts_dir
    )
    try:
        final_answer = _RUNNERS[variant.name](run)
    except Exception as err:  # pylint: disable=broad-exception-caught
        log.warning(
            "<RRR09182740W>",
            f"{variant.name} aborted for "
            f"{query.question_id or query.question_text!r}: {err}",
        )
        return run.trace("", failure=err)
    return run.trace(final_answer)


def record_query(record: EvalRecord) -> OriginalQuery:
    return OriginalQuery(
        question_text=record.question,
        context=None,
        temporal_anchor=record.temporal_anchor,
        question_id=record.record_id,
    )


def run_records(
    variant: Union[str, PipelineVariant],
    records: Sequence[EvalRecord],
    backend: ChatBackendBase,
    retriever: Optional[Retriever],
    config: RunConfig,
    progress: bool = False,
    on_trace: Optional[Callable[[PipelineTrace], None]] = None,
) -> List[PipelineTrace]:
    """Run a variant over many records on a bounded work pool

    At most config.concurrency questions are in flight at any time, and only
    one when the backend replays responses in call order. Traces come back in
    record order.
    """
    if isinstance(variant, str):
        variant = get_variant(variant)
    error.value_check(
        "<RRR09182741E>",
        config.concurrency >= 1,
        f"concurrency must be >= 1, got {config.concurrency}",
    )
    workers = config.concurrency
    if workers > 1 and backend.ordered_replay:
        log.warning(
            "<RRR09182742W>",
            f"{backend.endpoint} replays responses in call order, "
            "running records one at a time",
        )
        workers = 1

    def run_one(record: EvalRecord) -> PipelineTrace:
        trace = run_variant(variant, record_query(record), backend, retriever, config)
        if on_trace is not None:
            on_trace(trace)
        return trace

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(
            tqdm(
                pool.map(run_one, records),
                total=len(records),
                desc=variant.name,
                disable=not progress,
            )
        )
