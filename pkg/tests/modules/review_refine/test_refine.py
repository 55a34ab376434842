"""Tests for answer refinement and aggregation"""
# Third Party
import pytest

# Local
from caikit_multihop.data_model import (
    AggregationInput,
    Document,
    ModelConfig,
    SubAnswer,
)
from caikit_multihop.exceptions import AggregationEmpty, RefineEmpty
from caikit_multihop.modules.review_refine import aggregate, refine_step_answer
from caikit_multihop.resources.chat_backend import ScriptedBackend
from caikit_multihop.toolkit.reasoning_state import HistoryEntry
from caikit_multihop.toolkit.trace_utils import TraceRecorder
from tests.fixtures import scripted

## Setup ########################################################################

MODEL = ModelConfig(model_name="test-model")

SPOUSE_DOC = Document(
    doc_id="babis-family",
    title="Andrej Babis",
    body="In 2013 Monika changed her surname to Babisova, and they married in 2017.",
)

HISTORY = [
    HistoryEntry(
        sub_query="Who is the previous owner of Agrofert as of March 2024?",
        anticipated_answer="Andrej Babiš.",
        refined_answer="Andrej Babiš is the previous owner of Agrofert.",
    )
]


## refine_step_answer ##########################################################


def test_refine_without_documents_verifies_internally():
    backend = ScriptedBackend(
        rules=[
            {
                "pattern": "Verify the draft answer.*Draft answer:\nKhaby Lame\n",
                "response": "Refined Answer: Khaby Lame is the most-followed user.",
            }
        ]
    )
    answer = refine_step_answer(
        "Who is the most-followed user on TikTok?", "Khaby Lame", [], [], backend, MODEL
    )
    assert answer == "Khaby Lame is the most-followed user."


def test_refine_with_documents_uses_context():
    recorder = TraceRecorder()
    backend = ScriptedBackend(
        rules=[
            {
                "pattern": (
                    "retrieved context.*Reasoning history:\n1. Query: Who is the "
                    "previous owner.*Context:\n\\[1\\] Andrej Babis "
                    "\\(source: local_corpus, id: babis-family\\)"
                ),
                "response": "Monika Babišová.",
            }
        ]
    )
    answer = refine_step_answer(
        "Who is the spouse of Andrej Babiš as of March 2024?",
        "",
        [SPOUSE_DOC],
        HISTORY,
        backend,
        MODEL,
        recorder,
    )
    assert answer == "Monika Babišová."
    assert [call.purpose for call in recorder.calls] == ["refine"]


def test_refine_draft_placeholder_when_no_anticipated_answer():
    backend = ScriptedBackend(
        rules=[{"pattern": "Draft answer:\nNone\n", "response": "Paris."}]
    )
    assert refine_step_answer("Capital?", "", [], [], backend, MODEL) == "Paris."


@pytest.mark.parametrize("response", ["", "   ", "Refined Answer:", "Refined Answer: "])
def test_refine_empty(response):
    with pytest.raises(RefineEmpty):
        refine_step_answer("Capital?", "Paris", [], [], scripted(response), MODEL)


def test_refine_empty_query():
    with pytest.raises(ValueError):
        refine_step_answer("  ", "Paris", [], [], scripted("x"), MODEL)


## aggregate ###################################################################


def _aggregation(*pairs, anchor=None):
    return AggregationInput(
        original_question="How old is the most-followed user on TikTok?",
        sub_answers=[SubAnswer(query=query, answer=answer) for query, answer in pairs],
        temporal_anchor=anchor,
    )


def test_aggregate_keeps_step_order():
    backend = ScriptedBackend(
        rules=[
            {
                "pattern": (
                    "Time reference:\nas of June 2024.*"
                    "1. Query: Who\\?\n   Answer: Khaby Lame\n"
                    "2. Query: How old\\?\n   Answer: 24"
                ),
                "response": "Aggregated Answer: Khaby Lame is 24 years old.",
            }
        ]
    )
    answer = aggregate(
        _aggregation(("Who?", "Khaby Lame"), ("How old?", "24"), anchor="2024-06-15"),
        backend,
        MODEL,
    )
    assert answer == "Khaby Lame is 24 years old."


def test_aggregate_needs_sub_answers():
    with pytest.raises(ValueError):
        aggregate(_aggregation(), scripted("x"), MODEL)


def test_aggregate_rejects_wrong_input_type():
    with pytest.raises(TypeError):
        aggregate({"original_question": "q"}, scripted("x"), MODEL)


def test_aggregate_empty():
    with pytest.raises(AggregationEmpty):
        aggregate(
            _aggregation(("Who?", "Khaby")), scripted("Aggregated Answer: "), MODEL
        )
