"""Worked examples answered end to end through the command line with a
scripted model and the case study corpus
"""
# Standard
import os

# Third Party
import pytest

# Local
from caikit_multihop.cli import main
from caikit_multihop.toolkit.trace_utils import count_retrievals, read_trace
from tests.fixtures import (
    CASE_STUDIES,
    CASE_STUDY_CORPUS,
    case_study_path,
    load_case_study,
)

## Setup ########################################################################


@pytest.fixture(scope="module")
def index_path(tmp_path_factory):
    path = str(tmp_path_factory.mktemp("case_index") / "index")
    assert main(["index", CASE_STUDY_CORPUS, path]) == 0
    return path


def _ask(case_name, index_path, output_dir):
    case = load_case_study(case_name)
    argv = [
        "ask",
        case["question"],
        "--scripted",
        case_study_path(case_name),
        "--index",
        index_path,
        "--output-dir",
        output_dir,
    ]
    if case["as_of"]:
        argv += ["--as-of", case["as_of"]]
    return case, main(argv)


def _only_trace(output_dir):
    traces_dir = os.path.join(output_dir, "traces")
    names = os.listdir(traces_dir)
    assert len(names) == 1
    return os.path.join(traces_dir, names[0])


## Tests ########################################################################


@pytest.mark.parametrize("case_name", CASE_STUDIES)
def test_case_study(case_name, index_path, tmp_path, capsys):
    output_dir = str(tmp_path / "run")
    case, status = _ask(case_name, index_path, output_dir)
    assert status == 0

    printed = capsys.readouterr().out
    trace = read_trace(_only_trace(output_dir))
    assert printed.strip() == trace.final_answer
    assert trace.status == "completed"
    assert trace.query.question_text == case["question"]
    assert len(trace.steps) == case["step_count"]
    assert [step.needs_retrieval for step in trace.steps] == case["retrievals"]
    assert count_retrievals(trace.backend_call_log) == sum(case["retrievals"])
    assert len(trace.plan) == case["step_count"]
    for keyword in case["answer_keywords"]:
        assert keyword in trace.final_answer
    assert os.path.exists(os.path.join(output_dir, "manifest.json"))


@pytest.mark.parametrize("case_name", CASE_STUDIES)
def test_case_study_trace_rendering(case_name, index_path, tmp_path, capsys):
    output_dir = str(tmp_path / "run")
    case, _ = _ask(case_name, index_path, output_dir)
    capsys.readouterr()

    assert main(["trace", _only_trace(output_dir)]) == 0
    rendered = capsys.readouterr().out
    step_lines = [line for line in rendered.splitlines() if line.startswith("Step ")]
    assert len(step_lines) == case["step_count"]
    assert ("Retrieve:" in rendered) == any(case["retrievals"])
    assert rendered.count("Refined Answer:") == case["step_count"]
    assert "Aggregated Answer:" in rendered


def test_anchored_sub_queries(index_path, tmp_path):
    output_dir = str(tmp_path / "run")
    _ask("freshqa_tiktok", index_path, output_dir)
    trace = read_trace(_only_trace(output_dir))
    assert trace.query.temporal_anchor == "2024-06-15"
    assert all("June 2024" in step.rewritten_query for step in trace.steps)
    doc_ids = [doc.doc_id for doc in trace.steps[0].documents]
    assert "tiktok-top10" in doc_ids
