"""Tests for the caikit-multihop commands"""
# Standard
import glob
import json
import os

# Third Party
import pytest

# Local
from caikit_multihop.cli import main
from caikit_multihop.modules.retrieval import load_corpus_jsonl
from caikit_multihop.toolkit.trace_utils import read_trace
from tests.fixtures import (
    CAPITALS_DATASET,
    CASE_STUDY_CORPUS,
    CORPORA_DIR,
    write_script,
)

## Setup ########################################################################

CAPITAL_RULES = {
    "rules": [
        {"contains": "capital of France", "response": "Answer: Paris"},
        {"contains": "Eiffel Tower", "response": "Answer: Paris"},
        {"contains": "capital of Japan", "response": "Answer: Tokyo"},
        {"contains": "Question", "response": "Answer: I do not know"},
    ]
}

REPORT_FILES = ["report.json", "report.csv", "report.txt"]


@pytest.fixture
def capital_script(tmp_path):
    return write_script(str(tmp_path / "capitals.json"), CAPITAL_RULES)


def _eval_argv(script, output_dir, *extra):
    return [
        "eval",
        "--dataset",
        CAPITALS_DATASET,
        "--dataset-kind",
        "custom",
        "--variant",
        "vanilla",
        "--scripted",
        script,
        "--output-dir",
        output_dir,
        "--sample-size",
        "6",
        "--no-progress",
        *extra,
    ]


def _traces(output_dir):
    return sorted(glob.glob(os.path.join(output_dir, "traces", "*.json")))


def _read(path):
    with open(path, "rb") as handle:
        return handle.read()


## index #######################################################################


def test_index(tmp_path, capsys):
    output = str(tmp_path / "index")
    assert main(["index", CASE_STUDY_CORPUS, output]) == 0
    expected = len(load_corpus_jsonl(CASE_STUDY_CORPUS))
    assert f"Indexed {expected} documents" in capsys.readouterr().out
    assert os.listdir(output)


@pytest.mark.parametrize(
    "corpus",
    [os.path.join(CORPORA_DIR, "duplicate_ids.jsonl"), "/no/such/corpus.jsonl"],
)
def test_index_failures(corpus, tmp_path, capsys):
    assert main(["index", corpus, str(tmp_path / "index")]) == 1
    assert "caikit-multihop index:" in capsys.readouterr().err


## ask #########################################################################


def test_ask_prints_answer_and_writes_trace(capital_script, tmp_path, capsys):
    output_dir = str(tmp_path / "run")
    argv = ["ask", "What is the capital of France?", "--variant", "vanilla"]
    argv += ["--scripted", capital_script, "--output-dir", output_dir]
    assert main(argv) == 0
    assert capsys.readouterr().out.strip() == "Paris"

    (trace_path,) = _traces(output_dir)
    trace = read_trace(trace_path)
    assert trace.final_answer == "Paris"
    assert trace.variant == "vanilla"

    with open(os.path.join(output_dir, "manifest.json"), encoding="utf-8") as handle:
        manifest = json.load(handle)
    assert manifest["command"] == "ask"
    assert manifest["variants"] == ["vanilla"]
    assert manifest["config_digests"]["vanilla"] == trace.model_config_digest
    assert manifest["scripted_path"] == capital_script
    assert manifest["seed"] == 7


@pytest.mark.parametrize(
    "argv",
    [
        ["ask", "   ", "--variant", "vanilla"],
        ["ask", "Who?", "--variant", "vanilla", "--as-of", "June 2024"],
        # Retrieving variant without an index or web fixtures
        ["ask", "Who?", "--variant", "rrr_full"],
    ],
)
def test_ask_rejects_bad_input(argv, capital_script, tmp_path):
    argv = argv + ["--scripted", capital_script, "--output-dir", str(tmp_path)]
    assert main(argv) == 1
    assert not _traces(str(tmp_path))


def test_aborted_ask_keeps_partial_trace(tmp_path, capsys):
    script = write_script(str(tmp_path / "empty.json"), ["Answer:"])
    output_dir = str(tmp_path / "run")
    argv = ["ask", "Who?", "--variant", "vanilla"]
    argv += ["--scripted", script, "--output-dir", output_dir]
    assert main(argv) == 1
    assert "Aborted:" in capsys.readouterr().out
    (trace_path,) = _traces(output_dir)
    assert read_trace(trace_path).status == "aborted"


## eval ########################################################################


def test_eval_writes_report(capital_script, tmp_path, capsys):
    output_dir = str(tmp_path / "run")
    assert main(_eval_argv(capital_script, output_dir)) == 0
    assert "overall_accuracy" in capsys.readouterr().out
    for name in REPORT_FILES:
        assert os.path.exists(os.path.join(output_dir, name))
    assert len(_traces(output_dir)) == 6
    with open(os.path.join(output_dir, "report.json"), encoding="utf-8") as handle:
        report = json.load(handle)
    assert report["sample_size"] == 6
    assert report["variant"] == "vanilla"


def test_eval_rerun_from_cache_is_byte_identical(capital_script, tmp_path):
    cache_dir = str(tmp_path / "cache")
    first_dir = str(tmp_path / "first")
    second_dir = str(tmp_path / "second")
    assert main(_eval_argv(capital_script, first_dir, "--cache-dir", cache_dir)) == 0

    # Any call reaching this script fails its record
    unreachable = write_script(
        str(tmp_path / "unreachable.json"),
        {"rules": [{"contains": "never sent", "response": "x"}]},
    )
    assert main(_eval_argv(unreachable, second_dir, "--cache-dir", cache_dir)) == 0
    for name in REPORT_FILES:
        assert _read(os.path.join(first_dir, name)) == _read(
            os.path.join(second_dir, name)
        )


def test_eval_needs_a_dataset(capital_script, tmp_path):
    argv = ["eval", "--variant", "vanilla", "--scripted", capital_script]
    assert main(argv + ["--output-dir", str(tmp_path)]) == 1


## ablate ######################################################################


def test_ablate(capital_script, tmp_path, capsys):
    output_dir = str(tmp_path / "run")
    argv = _eval_argv(capital_script, output_dir)
    argv[0] = "ablate"
    argv += ["--variants", "vanilla,cot"]
    assert main(argv) == 0
    printed = capsys.readouterr().out
    assert "vanilla" in printed
    assert "cot" in printed
    for stem in ["report.vanilla", "report.cot", "ablation"]:
        assert os.path.exists(os.path.join(output_dir, f"{stem}.csv"))
    with open(os.path.join(output_dir, "manifest.json"), encoding="utf-8") as handle:
        assert json.load(handle)["variants"] == ["vanilla", "cot"]


## trace #######################################################################


def test_trace_without_retrieval(capital_script, tmp_path, capsys):
    output_dir = str(tmp_path / "run")
    argv = ["ask", "What is the capital of France?", "--variant", "vanilla"]
    argv += ["--scripted", capital_script, "--output-dir", output_dir]
    assert main(argv) == 0
    capsys.readouterr()

    (trace_path,) = _traces(output_dir)
    assert main(["trace", trace_path]) == 0
    rendered = capsys.readouterr().out
    assert "Step 1" in rendered
    assert "Retrieve" not in rendered
    assert "Aggregated Answer: Paris" in rendered


def test_trace_truncated_file(capital_script, tmp_path):
    output_dir = str(tmp_path / "run")
    argv = ["ask", "What is the capital of France?", "--variant", "vanilla"]
    argv += ["--scripted", capital_script, "--output-dir", output_dir]
    assert main(argv) == 0

    (trace_path,) = _traces(output_dir)
    content = _read(trace_path)
    truncated = str(tmp_path / "truncated.json")
    with open(truncated, "wb") as handle:
        handle.write(content[: len(content) // 2])
    assert main(["trace", truncated]) == 1
