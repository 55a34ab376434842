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
"""Scoring of pipeline traces against benchmark records"""

# Standard
from typing import Callable, Dict, Iterable, List, Optional, Sequence

# Third Party
import numpy as np

# First Party
from caikit import get_config
from caikit.core.exceptions import error_handler
import alog

# Local
from ...data_model import (
    EvalRecord,
    EvalReport,
    EvalRow,
    HopClass,
    PipelineTrace,
    TraceStatus,
)
from ...exceptions import UnmatchedTrace
from ...toolkit.trace_utils import count_retrievals
from .metrics import is_correct, token_f1

log = alog.use_channel("EVAL")
error = error_handler.get(log)

# Status of a record no trace was produced for
MISSING = "missing"

Judge = Callable[[EvalRecord, str], bool]


def _accuracy(flags: List[bool]) -> float:
    return float(np.mean(flags)) if flags else 0.0


def evaluate(
    traces: Iterable[PipelineTrace],
    records: Sequence[EvalRecord],
    judge: Optional[Judge] = None,
    seed: Optional[int] = None,
) -> EvalReport:
    """Score traces against the records they answer

    Records without a trace and aborted traces score as incorrect with F1 0.

    Args:
        traces: Iterable[PipelineTrace]
            One trace per answered record, matched on question_id
        records: Sequence[EvalRecord]
            The sampled records
        judge: Optional[Judge]
            Grader replacing the match rule for correctness
        seed: Optional[int]
            Sampling seed recorded in the report

    Returns:
        EvalReport
            Rows sorted by record_id

    Raises:
        ValueError when there are no traces or no records
        UnmatchedTrace when a trace answers no record
    """
    traces = list(traces)
    error.value_check("<RRR24681357E>", len(traces) > 0, "No traces to evaluate")
    error.value_check("<RRR24681358E>", len(records) > 0, "No records to evaluate")
    if seed is None:
        seed = int(get_config().evaluation.seed)

    by_id: Dict[str, EvalRecord] = {record.record_id: record for record in records}
    traces_by_id: Dict[str, PipelineTrace] = {}
    orphans = []
    for trace in traces:
        question_id = trace.query.question_id
        if question_id not in by_id:
            orphans.append(question_id)
            continue
        error.value_check(
            "<RRR24681359E>",
            question_id not in traces_by_id,
            f"More than one trace for record {question_id}",
        )
        traces_by_id[question_id] = trace
    if orphans:
        error("<RRR24681360E>", UnmatchedTrace(orphans))

    rows = []
    for record_id in sorted(by_id):
        record = by_id[record_id]
        trace = traces_by_id.get(record_id)
        if trace is None:
            status, prediction, retrievals = MISSING, "", 0
        else:
            status = trace.status
            prediction = trace.final_answer or ""
            retrievals = count_retrievals(trace.backend_call_log)
        completed = status == TraceStatus.COMPLETED.value and prediction.strip() != ""
        if not completed:
            correct, f1 = False, 0.0
        else:
            f1 = token_f1(prediction, record.gold_answers)
            if judge is not None:
                correct = bool(judge(record, prediction))
            else:
                correct = is_correct(prediction, record.gold_answers)
        rows.append(
            EvalRow(
                record_id=record_id,
                hop_class=record.hop_class,
                prediction=prediction,
                gold_answers=list(record.gold_answers),
                correct=correct,
                f1=float(f1),
                retrievals=retrievals,
                status=status,
            )
        )

    single = [row.correct for row in rows if row.hop_class == HopClass.SINGLE_HOP.value]
    multi = [row.correct for row in rows if row.hop_class == HopClass.MULTI_HOP.value]
    report = EvalReport(
        dataset=records[0].dataset,
        variant=traces[0].variant,
        seed=seed,
        sample_size=len(rows),
        single_hop_accuracy=_accuracy(single),
        multi_hop_accuracy=_accuracy(multi),
        overall_accuracy=_accuracy([row.correct for row in rows]),
        mean_f1=float(np.mean([row.f1 for row in rows])),
        single_hop_count=len(single),
        multi_hop_count=len(multi),
        total_retrievals=sum(row.retrievals for row in rows),
        failed_count=sum(
            1 for row in rows if row.status != TraceStatus.COMPLETED.value
        ),
        rows=rows,
        grading="llm_judge" if judge is not None else "match",
    )
    log.info(
        "<RRR24681361I>",
        f"{report.variant} on {report.dataset}: accuracy {report.overall_accuracy:.4f}"
        f" over {report.sample_size} records",
    )
    return report
