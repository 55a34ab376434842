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
"""Implementation of the caikit-multihop commands. Every command returns the
process exit status.
"""

# Standard
from typing import Dict, List, Optional, Sequence
import json
import os

# First Party
from caikit.core.exceptions import error_handler
import alog

# Local
from ..data_model import OriginalQuery, PipelineTrace, RunConfig, TraceStatus
from ..modules.baselines import ablation_matrix, run_records, run_variant
from ..modules.common import model_config_digest
from ..modules.evaluation import (
    LLMJudge,
    evaluate,
    load_dataset,
    render_text,
    sample,
    summary_frame,
    write_ablation_table,
    write_report,
)
from ..modules.retrieval import TOKENIZER_VERSION, BM25Retriever, Retriever
from ..resources.chat_backend import ChatBackendBase
from ..toolkit.prompt_templates import TEMPLATE_SET_VERSION, prompt_set_digest
from ..toolkit.temporal import parse_anchor
from ..toolkit.trace_utils import read_trace, write_trace
from ..version import __version__
from .components import build_backend, build_retriever

log = alog.use_channel("CLI")
error = error_handler.get(log)

MANIFEST_FILE = "manifest.json"
TRACES_DIR = "traces"


def run_manifest(
    config: RunConfig, command: str, variants: Optional[Sequence[str]] = None
) -> Dict[str, object]:
    """Everything needed to reproduce a run under the scripted backend"""
    variants = list(variants or [config.variant])
    return {
        "command": command,
        "version": __version__,
        "variants": variants,
        "config_digests": {
            variant: model_config_digest(config, variant) for variant in variants
        },
        "prompt_set_digest": prompt_set_digest(),
        "template_set_version": TEMPLATE_SET_VERSION,
        "tokenizer_version": TOKENIZER_VERSION,
        "seed": config.seed,
        "sample_size": config.sample_size,
        "dataset_kind": config.dataset_kind,
        "dataset_path": config.dataset_path,
        "model_name": config.model.model_name,
        "scripted_path": config.scripted_path,
    }


def write_manifest(
    config: RunConfig,
    output_dir: str,
    command: str,
    variants: Optional[Sequence[str]] = None,
) -> str:
    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, MANIFEST_FILE)
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(
            run_manifest(config, command, variants), handle, indent=2, sort_keys=True
        )
        handle.write("\n")
    return path


## index #######################################################################


def cmd_index(corpus_path: str, output_path: str) -> int:
    """Build and persist the BM25 index of a JSONL corpus"""
    retriever = BM25Retriever.bootstrap(corpus_path)
    retriever.save(output_path)
    index = retriever.index
    print(
        f"Indexed {index.doc_count} documents "
        f"(avg_doc_length {index.avg_doc_length:.2f}) into {output_path}"
    )
    return 0


## ask #########################################################################


def cmd_ask(
    question: str,
    config: RunConfig,
    as_of: Optional[str] = None,
    backend: Optional[ChatBackendBase] = None,
    retriever: Optional[Retriever] = None,
) -> int:
    """Answer one question, print the answer and write its trace"""
    error.value_check(
        "<RRR55021311E>",
        isinstance(question, str) and question.strip() != "",
        "question must not be empty",
    )
    anchor = parse_anchor(as_of)
    query = OriginalQuery(
        question_text=question.strip(),
        temporal_anchor=anchor.isoformat() if anchor else None,
    )
    backend = backend or build_backend(config)
    if retriever is None:
        retriever = build_retriever(config)

    trace = run_variant(config.variant, query, backend, retriever, config)
    path = write_trace(trace, os.path.join(config.output_dir, TRACES_DIR))
    write_manifest(config, config.output_dir, "ask")
    if trace.status == TraceStatus.ABORTED.value:
        log.error("<RRR55021312E>", f"Run aborted: {trace.error}")
        print(f"Aborted: {trace.error}\nPartial trace: {path}")
        return 1
    print(trace.final_answer)
    log.info("<RRR55021313I>", f"Trace written to {path}")
    return 0


## eval ########################################################################


def _load_records(config: RunConfig):
    error.value_check(
        "<RRR55021314E>", bool(config.dataset_path), "dataset_path must be set"
    )
    records = load_dataset(config.dataset_path, config.dataset_kind)
    return sample(records, config.sample_size, config.seed)


def _judge(config: RunConfig, backend: ChatBackendBase) -> Optional[LLMJudge]:
    return LLMJudge(backend, config.model) if config.judge else None


def cmd_eval(
    config: RunConfig,
    backend: Optional[ChatBackendBase] = None,
    retriever: Optional[Retriever] = None,
    progress: bool = True,
) -> int:
    """Run the configured variant over the sampled records and score it"""
    records = _load_records(config)
    backend = backend or build_backend(config)
    if retriever is None:
        retriever = build_retriever(config)
    traces_dir = os.path.join(config.output_dir, TRACES_DIR)

    traces = run_records(
        config.variant,
        records,
        backend,
        retriever,
        config,
        progress=progress,
        on_trace=lambda trace: write_trace(trace, traces_dir),
    )
    report = evaluate(traces, records, judge=_judge(config, backend), seed=config.seed)
    write_report(report, config.output_dir)
    write_manifest(config, config.output_dir, "eval")
    print(render_text(summary_frame([report])))
    return 0


## ablate ######################################################################


def cmd_ablate(
    config: RunConfig,
    variants: Sequence[str],
    backend: Optional[ChatBackendBase] = None,
    retriever: Optional[Retriever] = None,
    progress: bool = True,
) -> int:
    """Run several variants over the same sampled records and tabulate them"""
    records = _load_records(config)
    backend = backend or build_backend(config)
    if retriever is None:
        retriever = build_retriever(config, variants)
    traces_dir = os.path.join(config.output_dir, TRACES_DIR)

    reports = ablation_matrix(
        records,
        variants,
        backend,
        retriever,
        config,
        judge=_judge(config, backend),
        on_trace=lambda trace: write_trace(trace, traces_dir),
        progress=progress,
    )
    for report in reports:
        write_report(report, config.output_dir, stem=f"report.{report.variant}")
    write_ablation_table(reports, config.output_dir)
    write_manifest(config, config.output_dir, "ablate", variants)
    print(render_text(summary_frame(reports)))
    return 0


## trace #######################################################################


def render_trace(trace: PipelineTrace) -> str:
    """Step by step layout of a trace"""
    lines: List[str] = [f"Question: {trace.query.question_text}"]
    if trace.query.temporal_anchor:
        lines.append(f"As of: {trace.query.temporal_anchor}")
    lines.append(f"Variant: {trace.variant}")
    for number, plan_step in enumerate(trace.plan or [], start=1):
        lines.append(f"Plan {number}: {plan_step}")
    for step in trace.steps:
        lines.append("")
        lines.append(f"Step {step.index}")
        lines.append(f"  Query Rewriting: {step.rewritten_query}")
        if step.anticipated_answer:
            lines.append(f"  Answer: {step.anticipated_answer}")
        if step.needs_retrieval:
            for document in step.documents or []:
                title = document.title or document.doc_id
                lines.append(f"  Retrieve: [{document.doc_id}] {title}")
            if not step.documents:
                lines.append("  Retrieve: (no results)")
        lines.append(f"  Refined Answer: {step.refined_answer}")
    lines.append("")
    if trace.status == TraceStatus.ABORTED.value:
        lines.append(f"Aborted: {trace.error}")
    else:
        lines.append(f"Aggregated Answer: {trace.final_answer}")
    return "\n".join(lines)


def cmd_trace(trace_path: str) -> int:
    """Print a written trace"""
    print(render_trace(read_trace(trace_path)))
    return 0
