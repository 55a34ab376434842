"""Tests for trace recording and serialization
"""
# Standard
import json
import os

# Third Party
import pytest

# Local
from caikit_multihop.data_model import (
    CallKind,
    ChatMessage,
    Document,
    PipelineTrace,
    StepTiming,
    SubQueryStep,
)
from caikit_multihop.exceptions import TraceParseError
from caikit_multihop.toolkit.trace_utils import (
    VOLATILE_TRACE_FIELDS,
    TraceRecorder,
    canonical_json,
    canonical_trace_json,
    count_retrievals,
    digest,
    read_trace,
    trace_file_name,
    write_trace,
)
from tests.fixtures import make_query

## Helpers #####################################################################


def _trace(
    started_at="2024-06-15T10:00:00.000Z", seconds=0.5, question_id="q/1"
):
    recorder = TraceRecorder()
    with recorder.step(1):
        recorder.record_model_call(
            "review", [ChatMessage(role="user", content="Q?")], "Query: Q?"
        )
        recorder.record_retrieval(
            "Q?", [Document(doc_id="d1", title="t", body="b", score=1.0)]
        )
    return PipelineTrace(
        query=make_query(question_id=question_id),
        steps=[
            SubQueryStep(
                index=1,
                rewritten_query="Q?",
                needs_retrieval=True,
                documents=[Document(doc_id="d1", title="t", body="b", score=1.0)],
                refined_answer="A.",
                terminate=True,
            )
        ],
        final_answer="A.",
        model_config_digest="abc",
        timing=[StepTiming(step_index=1, seconds=seconds)],
        backend_call_log=recorder.calls,
        started_at=started_at,
        finished_at=started_at,
    )


## Tests ########################################################################


def test_canonical_json_is_order_stable():
    assert canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'
    assert digest({"b": 1, "a": 2}) == digest({"a": 2, "b": 1})
    assert digest("text") != digest("text ")


def test_recorder_attributes_calls_to_steps():
    recorder = TraceRecorder()
    recorder.record_model_call("plan", [ChatMessage(role="user", content="x")], "y")
    with recorder.step(2):
        recorder.record_retrieval("query", [])
    assert [call.step_index for call in recorder.calls] == [0, 2]
    assert recorder.calls[0].kind == CallKind.MODEL.value
    assert recorder.calls[0].response_text == "y"
    assert recorder.calls[1].doc_ids == []
    assert recorder.retrieval_count == 1
    assert recorder.step_index == 0
    assert [timing.step_index for timing in recorder.timing] == [2]


def test_count_retrievals():
    trace = _trace()
    assert count_retrievals(trace.backend_call_log) == 1


def test_canonical_trace_ignores_wall_clock_fields():
    """Traces of identical runs differ only in volatile fields"""
    first = _trace(started_at="2024-06-15T10:00:00.000Z", seconds=0.5)
    second = _trace(started_at="2025-01-01T00:00:00.000Z", seconds=2.0)
    assert canonical_trace_json(first) == canonical_trace_json(second)
    for field_name in VOLATILE_TRACE_FIELDS:
        assert field_name not in json.loads(canonical_trace_json(first))


def test_write_and_read_trace(tmp_path):
    trace = _trace()
    path = write_trace(trace, str(tmp_path / "traces"))
    assert os.path.basename(path) == trace_file_name(trace)
    assert os.path.basename(path) == "q_1.rrr_full.json"
    loaded = read_trace(path)
    assert loaded.final_answer == "A."
    assert loaded.query.question_id == "q/1"
    assert [doc.doc_id for doc in loaded.steps[0].documents] == ["d1"]
    assert count_retrievals(loaded.backend_call_log) == 1


def test_trace_file_name_without_question_id():
    trace = _trace(question_id="")
    assert trace_file_name(trace).endswith(".rrr_full.json")
    assert len(trace_file_name(trace).split(".")[0]) == 16


@pytest.mark.parametrize(
    "content",
    ['{"query": {"question_text": "Q"}, "steps": [', "[1, 2]", '{"steps": []}'],
)
def test_read_trace_rejects_invalid_files(tmp_path, content):
    path = tmp_path / "broken.json"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(TraceParseError):
        read_trace(str(path))
