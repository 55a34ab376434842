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
"""Report rendering: JSON, CSV and aligned text tables.

Reports carry no timestamps, so equal runs produce byte-identical files.
"""

# Standard
from typing import Dict, Sequence
import json
import os

# Third Party
import pandas as pd

# Local
from ...data_model import EvalReport

FLOAT_FORMAT = "%.4f"

SUMMARY_COLUMNS = [
    "variant",
    "dataset",
    "seed",
    "sample_size",
    "single_hop_accuracy",
    "multi_hop_accuracy",
    "overall_accuracy",
    "mean_f1",
    "single_hop_count",
    "multi_hop_count",
    "total_retrievals",
    "failed_count",
    "grading",
]

ROW_COLUMNS = [
    "record_id",
    "hop_class",
    "status",
    "correct",
    "f1",
    "retrievals",
    "prediction",
    "gold_answers",
]


def summary_frame(reports: Sequence[EvalReport]) -> pd.DataFrame:
    """One row per report"""
    return pd.DataFrame(
        [
            {column: getattr(report, column) for column in SUMMARY_COLUMNS}
            for report in reports
        ],
        columns=SUMMARY_COLUMNS,
    )


def rows_frame(report: EvalReport) -> pd.DataFrame:
    """One row per scored record"""
    return pd.DataFrame(
        [
            {
                "record_id": row.record_id,
                "hop_class": row.hop_class,
                "status": row.status,
                "correct": row.correct,
                "f1": row.f1,
                "retrievals": row.retrievals,
                "prediction": " ".join(row.prediction.split()),
                "gold_answers": " | ".join(row.gold_answers),
            }
            for row in report.rows
        ],
        columns=ROW_COLUMNS,
    )


def render_text(frame: pd.DataFrame) -> str:
    return frame.to_string(
        index=False, float_format=lambda value: FLOAT_FORMAT % value
    )


def render_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, float_format=FLOAT_FORMAT)


def report_json(report: EvalReport) -> str:
    content = json.dumps(report.to_dict(), indent=2, sort_keys=True, ensure_ascii=False)
    return content + "\n"


def _write(path: str, content: str):
    with open(path, "w", encoding="utf-8", newline="") as handle:
        handle.write(content)


def write_report(
    report: EvalReport, output_dir: str, stem: str = "report"
) -> Dict[str, str]:
    """Write `<stem>.json`, `<stem>.csv` (per record) and `<stem>.txt`
    (summary then per record table)

    Returns:
        Dict[str, str]
            Written paths by format
    """
    os.makedirs(output_dir, exist_ok=True)
    paths = {
        "json": os.path.join(output_dir, f"{stem}.json"),
        "csv": os.path.join(output_dir, f"{stem}.csv"),
        "text": os.path.join(output_dir, f"{stem}.txt"),
    }
    _write(paths["json"], report_json(report))
    _write(paths["csv"], render_csv(rows_frame(report)))
    _write(
        paths["text"],
        render_text(summary_frame([report]))
        + "\n\n"
        + render_text(rows_frame(report))
        + "\n",
    )
    return paths


def write_ablation_table(
    reports: Sequence[EvalReport], output_dir: str, stem: str = "ablation"
) -> Dict[str, str]:
    """Comparative table with one row per variant"""
    os.makedirs(output_dir, exist_ok=True)
    frame = summary_frame(reports)
    paths = {
        "json": os.path.join(output_dir, f"{stem}.json"),
        "csv": os.path.join(output_dir, f"{stem}.csv"),
        "text": os.path.join(output_dir, f"{stem}.txt"),
    }
    _write(
        paths["json"],
        json.dumps(
            [report.to_dict() for report in reports],
            indent=2,
            sort_keys=True,
            ensure_ascii=False,
        )
        + "\n",
    )
    _write(paths["csv"], render_csv(frame))
    _write(paths["text"], render_text(frame) + "\n")
    return paths

