"""Helpful fixtures for configuring individual unit tests."""

# Standard
from contextlib import contextmanager
from typing import Any, Dict, List, Optional, Sequence
from unittest import mock
import json
import os
import re
import threading
import time

# First Party
from caikit.config.config import merge_configs
import aconfig
import caikit

# Local
from caikit_multihop.data_model import (
    ChatExchange,
    ChatMessage,
    EvalRecord,
    ModelConfig,
    OriginalQuery,
    RetrieverConfig,
    RunConfig,
)
from caikit_multihop.modules.retrieval import BM25Retriever, load_corpus_jsonl
from caikit_multihop.resources.chat_backend import ChatBackendBase, ScriptedBackend

### Constants used in fixtures
FIXTURES_DIR = os.path.join(os.path.dirname(__file__))
CASE_STUDIES_DIR = os.path.join(FIXTURES_DIR, "case_studies")
CORPORA_DIR = os.path.join(FIXTURES_DIR, "corpora")
DATASETS_DIR = os.path.join(FIXTURES_DIR, "datasets")
SCRIPTS_DIR = os.path.join(FIXTURES_DIR, "scripts")

CASE_STUDY_CORPUS = os.path.join(CORPORA_DIR, "case_studies.jsonl")
TWO_FILMS_CORPUS = os.path.join(CORPORA_DIR, "two_films.jsonl")
CAPITALS_DATASET = os.path.join(DATASETS_DIR, "capitals.jsonl")

CASE_STUDIES = [
    "freshqa_tiktok",
    "pat_agrofert",
    "two_wiki_directors",
    "multihop_rag_google",
]


def case_study_path(name: str) -> str:
    return os.path.join(CASE_STUDIES_DIR, f"{name}.json")


def load_case_study(name: str) -> Dict[str, Any]:
    with open(case_study_path(name), "r", encoding="utf-8") as handle:
        return json.load(handle)


def case_study_retriever() -> BM25Retriever:
    return BM25Retriever.train(load_corpus_jsonl(CASE_STUDY_CORPUS))


def make_run_config(**overrides) -> RunConfig:
    """RunConfig for tests: a fake model name, top_k 3 and one worker"""
    model = overrides.pop("model", None) or ModelConfig(model_name="test-model")
    retriever = overrides.pop("retriever", None) or RetrieverConfig(top_k=3)
    values = {"concurrency": 1, "seed": 7, "step_budget": 8}
    values.update(overrides)
    return RunConfig(model=model, retriever=retriever, **values)


def make_query(
    question: str = "How old is the most-followed user on TikTok?",
    anchor: Optional[str] = None,
    question_id: str = "q-1",
) -> OriginalQuery:
    return OriginalQuery(
        question_text=question, temporal_anchor=anchor, question_id=question_id
    )


def make_record(
    record_id: str,
    question: str,
    answers: Sequence[str],
    hop_class: str = "multi_hop",
    dataset: str = "custom",
) -> EvalRecord:
    return EvalRecord(
        record_id=record_id,
        question=question,
        gold_answers=list(answers),
        hop_class=hop_class,
        dataset=dataset,
    )


def write_jsonl(path: str, entries: Sequence[Dict[str, Any]]) -> str:
    with open(path, "w", encoding="utf-8") as handle:
        for entry in entries:
            handle.write(json.dumps(entry, ensure_ascii=False) + "\n")
    return path


def review_refine_rules(answers: Dict[str, str]) -> List[Dict[str, str]]:
    """Rules answering every question of `answers` in a single step of the
    review-then-refine pipeline
    """
    rules = [
        {
            "contains": "Decompose the question into",
            "response": '{"step 1": "Answer the question directly."}',
        }
    ]
    for question, answer in answers.items():
        quoted = re.escape(question)
        rules += [
            {
                "pattern": "You review a complex question.*"
                f"Original question:\n{quoted}\n",
                "response": f"Query: {question}\nAnswer: {answer}\n[final]",
            },
            {
                "pattern": f"Verify the draft answer.*Sub-query:\n{quoted}\n",
                "response": f"Refined Answer: {answer}",
            },
            {
                "pattern": f"based on the sub-answers.*Question:\n{quoted}\n",
                "response": f"Aggregated Answer: {answer}",
            },
        ]
    return rules


def write_script(path: str, script: Any) -> str:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(script, handle, ensure_ascii=False, indent=2)
    return path


class InFlightCounter(ChatBackendBase):
    """Wraps a backend and records the highest number of calls in flight"""

    def __init__(self, backend: ChatBackendBase, delay: float = 0.005):
        super().__init__()
        self.backend = backend
        self.delay = delay
        self.in_flight = 0
        self.max_in_flight = 0
        self._lock = threading.Lock()

    @property
    def endpoint(self) -> str:
        return self.backend.endpoint

    @property
    def ordered_replay(self) -> bool:
        return self.backend.ordered_replay

    def _complete(
        self, config: ModelConfig, messages: List[ChatMessage]
    ) -> ChatExchange:
        with self._lock:
            self.in_flight += 1
            self.max_in_flight = max(self.max_in_flight, self.in_flight)
        try:
            time.sleep(self.delay)
            return self.backend.complete(config, messages)
        finally:
            with self._lock:
                self.in_flight -= 1


def scripted(*responses: str) -> ScriptedBackend:
    return ScriptedBackend(transcript=list(responses))


@contextmanager
def temp_config(**overrides):
    local_config = aconfig.Config(
        json.loads(json.dumps(caikit.config.get_config())),
        override_env_vars=False,
    )
    merge_configs(local_config, overrides)

    with mock.patch.object(caikit.config.config, "_IMMUTABLE_CONFIG", local_config):
        yield local_config
