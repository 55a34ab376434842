"""Tests for scoring traces against benchmark records"""
# Standard
import random

# Third Party
import pytest

# Local
from caikit_multihop.data_model import BackendCall, PipelineTrace
from caikit_multihop.exceptions import UnmatchedTrace
from caikit_multihop.modules.evaluation import evaluate
from tests.fixtures import make_query, make_record

## Setup ########################################################################

RECORDS = [
    make_record("cap-01", "What is the capital of France?", ["Paris"], "single_hop"),
    make_record("cap-02", "What is the capital of Japan?", ["Tokyo"], "single_hop"),
    make_record(
        "cap-06",
        "What is the capital of the country where the Eiffel Tower stands?",
        ["Paris"],
    ),
]


def _trace(record_id, answer, retrievals=0, status="completed", variant="rrr_full"):
    calls = [
        BackendCall(
            kind="retriever",
            purpose="retrieve",
            step_index=1,
            prompt_digest="p",
            response_digest="r",
            doc_ids=["d1"],
        )
        for _ in range(retrievals)
    ]
    return PipelineTrace(
        query=make_query(question_id=record_id),
        steps=[],
        final_answer=answer,
        model_config_digest="abc",
        timing=[],
        backend_call_log=calls,
        variant=variant,
        status=status,
    )


## Tests ########################################################################


def test_accuracy_by_hop_class():
    report = evaluate(
        [
            _trace("cap-06", "The capital is Paris.", retrievals=2),
            _trace("cap-01", "Paris"),
            _trace("cap-02", "Kyoto", retrievals=1),
        ],
        RECORDS,
        seed=3,
    )
    assert report.overall_accuracy == pytest.approx(2 / 3)
    assert report.single_hop_accuracy == pytest.approx(0.5)
    assert report.multi_hop_accuracy == 1.0
    assert report.single_hop_count == 2
    assert report.multi_hop_count == 1
    assert report.total_retrievals == 3
    assert report.failed_count == 0
    assert report.seed == 3
    assert report.variant == "rrr_full"
    assert report.dataset == "custom"
    assert report.grading == "match"
    assert [row.record_id for row in report.rows] == ["cap-01", "cap-02", "cap-06"]
    assert [row.retrievals for row in report.rows] == [0, 1, 2]


def test_aborted_and_missing_records_score_zero():
    report = evaluate(
        [_trace("cap-01", "Paris", status="aborted"), _trace("cap-02", "Tokyo")],
        RECORDS,
        seed=1,
    )
    rows = {row.record_id: row for row in report.rows}
    assert rows["cap-01"].status == "aborted"
    assert not rows["cap-01"].correct
    assert rows["cap-01"].f1 == 0.0
    assert rows["cap-06"].status == "missing"
    assert rows["cap-06"].prediction == ""
    assert rows["cap-02"].correct
    assert report.failed_count == 2
    assert report.sample_size == 3
    assert report.overall_accuracy == pytest.approx(1 / 3)


def test_empty_prediction_is_incorrect():
    report = evaluate([_trace("cap-01", "  ")], RECORDS[:1], seed=1)
    assert not report.rows[0].correct


def test_seed_defaults_to_config():
    report = evaluate([_trace("cap-01", "Paris")], RECORDS[:1])
    assert report.seed == 7


def test_judge_replaces_match_rule():
    verdicts = []

    def judge(record, prediction):
        verdicts.append((record.record_id, prediction))
        return True

    report = evaluate([_trace("cap-02", "Kyoto")], RECORDS[1:2], judge=judge, seed=1)
    assert verdicts == [("cap-02", "Kyoto")]
    assert report.rows[0].correct
    assert report.rows[0].f1 == 0.0
    assert report.grading == "llm_judge"


def test_report_does_not_depend_on_input_order():
    traces = [
        _trace("cap-06", "The capital is Paris.", retrievals=2),
        _trace("cap-01", "Paris", status="aborted"),
        _trace("cap-02", "Kyoto", retrievals=1),
    ]
    expected = evaluate(traces, RECORDS, seed=3).to_dict()
    rng = random.Random(13)
    for _ in range(10):
        shuffled_traces = rng.sample(traces, len(traces))
        shuffled_records = rng.sample(RECORDS, len(RECORDS))
        report = evaluate(shuffled_traces, shuffled_records, seed=3)
        assert report.to_dict() == expected


def test_unmatched_trace():
    with pytest.raises(UnmatchedTrace) as err:
        evaluate(
            [_trace("cap-01", "Paris"), _trace("zz-9", "x"), _trace("aa-1", "y")],
            RECORDS,
            seed=1,
        )
    assert err.value.orphan_ids == ["aa-1", "zz-9"]


def test_duplicate_trace():
    with pytest.raises(ValueError):
        evaluate(
            [_trace("cap-01", "Paris"), _trace("cap-01", "Lyon")], RECORDS, seed=1
        )


@pytest.mark.parametrize(
    ["traces", "records"], [([], RECORDS), ([_trace("cap-01", "Paris")], [])]
)
def test_nothing_to_evaluate(traces, records):
    with pytest.raises(ValueError):
        evaluate(traces, records, seed=1)
