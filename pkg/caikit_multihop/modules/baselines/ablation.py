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
"""Run several variants over the same records and compare them"""

# Standard
from typing import Callable, Dict, List, Optional, Sequence

# First Party
from caikit.core.exceptions import error_handler
import alog

# Local
from ...data_model import EvalRecord, EvalReport, PipelineTrace, RunConfig
from ...resources.chat_backend import ChatBackendBase
from ..evaluation import evaluate
from ..evaluation.scoring import Judge
from ..retrieval import Retriever
from .runners import run_records
from .variants import get_variant

log = alog.use_channel("ABLATION")
error = error_handler.get(log)


def ablation_matrix(
    records: Sequence[EvalRecord],
    variants: Sequence[str],
    backend: ChatBackendBase,
    retriever: Optional[Retriever],
    config: RunConfig,
    judge: Optional[Judge] = None,
    on_trace: Optional[Callable[[PipelineTrace], None]] = None,
    progress: bool = False,
) -> List[EvalReport]:
    """One EvalReport per variant, all over the same records

    Failed questions are scored per record and never stop the matrix.

    Args:
        records: Sequence[EvalRecord]
            Sampled records shared by every variant
        variants: Sequence[str]
            Variant names, at least one, each once
        backend: ChatBackendBase
            Model backend
        retriever: Optional[Retriever]
            Needed when a listed variant retrieves
        config: RunConfig
            Run settings; its seed is recorded in every report

    Returns:
        List[EvalReport]
            In the order of `variants`
    """
    variants = list(variants)
    error.value_check("<RRR31990266E>", len(variants) > 0, "No variants to compare")
    error.value_check(
        "<RRR31990267E>",
        len(set(variants)) == len(variants),
        f"Variants listed more than once: {variants}",
    )
    error.value_check("<RRR31990268E>", len(records) > 0, "No records to run")
    resolved = [get_variant(name) for name in variants]

    reports: Dict[str, EvalReport] = {}
    for variant in resolved:
        traces = run_records(
            variant,
            records,
            backend,
            retriever,
            config,
            progress=progress,
            on_trace=on_trace,
        )
        reports[variant.name] = evaluate(traces, records, judge=judge, seed=config.seed)
    return [reports[name] for name in variants]
