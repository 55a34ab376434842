"""Tests for report rendering"""
# Standard
import json

# Third Party
import pandas as pd

# Local
from caikit_multihop.modules.evaluation import (
    evaluate,
    render_text,
    summary_frame,
    write_ablation_table,
    write_report,
)
from caikit_multihop.modules.evaluation.report import ROW_COLUMNS, SUMMARY_COLUMNS
from tests.modules.evaluation.test_scoring import RECORDS, _trace

## Setup ########################################################################


def _report(variant="rrr_full"):
    traces = [
        _trace("cap-01", "Paris", variant=variant),
        _trace("cap-02", "Kyoto\n  maybe", retrievals=1, variant=variant),
        _trace("cap-06", "Paris", retrievals=2, variant=variant),
    ]
    return evaluate(traces, RECORDS, seed=7)


def _read(path):
    with open(path, "rb") as handle:
        return handle.read()


## Tests ########################################################################


def test_write_report_files(tmp_path):
    paths = write_report(_report(), str(tmp_path))
    assert sorted(paths) == ["csv", "json", "text"]

    with open(paths["json"], encoding="utf-8") as handle:
        loaded = json.load(handle)
    assert loaded["variant"] == "rrr_full"
    assert len(loaded["rows"]) == 3

    rows = pd.read_csv(paths["csv"])
    assert list(rows.columns) == ROW_COLUMNS
    assert list(rows["record_id"]) == ["cap-01", "cap-02", "cap-06"]
    # Predictions are flattened to one line
    assert rows["prediction"][1] == "Kyoto maybe"

    with open(paths["text"], encoding="utf-8") as handle:
        text = handle.read()
    assert "overall_accuracy" in text
    assert "0.6667" in text


def test_identical_reports_are_byte_identical(tmp_path):
    first = write_report(_report(), str(tmp_path / "first"))
    second = write_report(_report(), str(tmp_path / "second"))
    for kind, path in first.items():
        assert _read(path) == _read(second[kind])


def test_ablation_table(tmp_path):
    reports = [_report("rrr_full"), _report("vanilla")]
    paths = write_ablation_table(reports, str(tmp_path), stem="cmp")
    assert paths["csv"].endswith("cmp.csv")
    table = pd.read_csv(paths["csv"])
    assert list(table.columns) == SUMMARY_COLUMNS
    assert list(table["variant"]) == ["rrr_full", "vanilla"]
    with open(paths["json"], encoding="utf-8") as handle:
        assert [entry["variant"] for entry in json.load(handle)] == [
            "rrr_full",
            "vanilla",
        ]


def test_render_text_formats_floats():
    text = render_text(summary_frame([_report()]))
    assert "0.6667" in text
    assert "rrr_full" in text
