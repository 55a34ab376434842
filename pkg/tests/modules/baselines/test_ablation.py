"""Tests for running several variants over the same records"""
# Third Party
import pytest

# Local
from caikit_multihop.modules.baselines import ablation_matrix
from caikit_multihop.resources.chat_backend import ScriptedBackend
from tests.fixtures import case_study_retriever, make_record, make_run_config

## Setup ########################################################################

PLAN = ["Which country has the Eiffel Tower?", "What is the capital of that country?"]

RULES = [
    {
        "contains": "Decompose the question into",
        "response": '{"step 1": "%s", "step 2": "%s"}' % tuple(PLAN),
    },
    {
        "pattern": "You review a complex question.*\n1\\. Query: In which country",
        "response": "Query: What is the capital of France?\nAnswer: Paris\n[final]",
    },
    {
        "contains": "You review a complex question",
        "response": "Query: In which country is the Eiffel Tower?\nAnswer: France",
    },
    {
        "pattern": "You answer a complex question.*Sub-query:\nWhich country",
        "response": "Query: Which country has the Eiffel Tower?\nAnswer: France",
    },
    {
        "pattern": "You answer a complex question.*Sub-query:\nWhat is the capital",
        "response": "Query: What is the capital of that country?\nAnswer: Paris",
    },
    {"pattern": "Verify the draft.*Draft answer:\nFrance\n", "response": "France"},
    {"pattern": "Verify the draft.*Draft answer:\nParis\n", "response": "Paris"},
    {"contains": "based on the sub-answers", "response": "Aggregated Answer: Paris"},
]

RECORDS = [
    make_record(
        "cap-06",
        "What is the capital of the country where the Eiffel Tower stands?",
        ["Paris"],
    )
]


def _matrix(variants, records=RECORDS):
    return ablation_matrix(
        records,
        variants,
        ScriptedBackend(rules=RULES),
        case_study_retriever(),
        make_run_config(),
    )


## Tests ########################################################################


def test_reports_follow_variant_order():
    variants = ["rrr_no_rewrite", "rrr_full", "rrr_no_decompose"]
    reports = _matrix(variants)
    assert [report.variant for report in reports] == variants
    for report in reports:
        assert report.overall_accuracy == 1.0
        assert report.multi_hop_count == 1
        assert report.failed_count == 0
        assert report.seed == 7


def test_switches_shape_the_steps():
    seen = {}
    ablation_matrix(
        RECORDS,
        ["rrr_full", "rrr_no_rewrite", "rrr_no_decompose"],
        ScriptedBackend(rules=RULES),
        case_study_retriever(),
        make_run_config(),
        on_trace=lambda trace: seen.setdefault(trace.variant, trace),
    )
    fixed = seen["rrr_no_rewrite"]
    assert [step.rewritten_query for step in fixed.steps] == PLAN

    full = seen["rrr_full"]
    assert full.plan == PLAN
    assert [step.rewritten_query for step in full.steps] == [
        "In which country is the Eiffel Tower?",
        "What is the capital of France?",
    ]

    single = seen["rrr_no_decompose"]
    assert len(single.steps) == 1
    assert single.plan == []


def test_failed_variant_scores_zero_without_stopping():
    reports = ablation_matrix(
        RECORDS,
        ["searchain", "rrr_full"],
        ScriptedBackend(rules=RULES),
        case_study_retriever(),
        make_run_config(),
    )
    assert reports[0].overall_accuracy == 0.0
    assert reports[0].failed_count == 1
    assert reports[1].overall_accuracy == 1.0


@pytest.mark.parametrize(
    "variants", [[], ["rrr_full", "rrr_full"], ["rrr_full", "no_such_variant"]]
)
def test_bad_variant_lists(variants):
    with pytest.raises(ValueError):
        _matrix(variants)


def test_no_records():
    with pytest.raises(ValueError):
        _matrix(["rrr_full"], records=[])
