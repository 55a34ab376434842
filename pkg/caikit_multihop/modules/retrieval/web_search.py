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
"""Web search adapters. Only recorded results ship with the library; a live
search engine plugs in by implementing WebSearchAdapter.
"""

# Standard
from abc import ABC, abstractmethod
from typing import Iterable, List
import json
import os
import threading

# First Party
from caikit.core.exceptions import error_handler
import alog

# Local
from ...data_model import Document, DocumentSource, RetrieverConfig
from ...exceptions import TraceParseError
from ...toolkit.trace_utils import digest

log = alog.use_channel("WEBSEARCH")
error = error_handler.get(log)


def fixture_name(query: str) -> str:
    return f"{digest(query.strip())}.json"


class WebSearchAdapter(ABC):
    """A search engine answering free text queries"""

    def __init__(self):
        self._access_count = 0
        self._access_lock = threading.Lock()

    @property
    def access_count(self) -> int:
        return self._access_count

    def search(self, query: str, config: RetrieverConfig) -> List[Document]:
        with self._access_lock:
            self._access_count += 1
        results = sorted(self._search(query), key=lambda doc: (-doc.score, doc.doc_id))
        if config.min_score > 0:
            results = [doc for doc in results if doc.score >= config.min_score]
        return results[: config.top_k]

    @abstractmethod
    def _search(self, query: str) -> List[Document]:
        """Raw results for the query in any order"""


class RecordedWebSearch(WebSearchAdapter):
    """Replays results stored as `<sha256 of query>.json` files holding
    {"query": ..., "results": [{"id", "title", "text", "score"}, ...]}
    """

    def __init__(self, fixtures_dir: str):
        super().__init__()
        error.dir_check("<RRR40417902E>", fixtures_dir)
        self.fixtures_dir = fixtures_dir

    def _search(self, query: str) -> List[Document]:
        path = os.path.join(self.fixtures_dir, fixture_name(query))
        if not os.path.exists(path):
            log.warning("<RRR40417903W>", f"No recorded results for query {query!r}")
            return []
        try:
            with open(path, "r", encoding="utf-8") as handle:
                recorded = json.load(handle)
            return [
                Document(
                    doc_id=str(entry["id"]),
                    title=entry.get("title") or "",
                    body=entry["text"],
                    score=float(entry.get("score", 0.0)),
                    source=DocumentSource.WEB.value,
                )
                for entry in recorded["results"]
            ]
        except (ValueError, KeyError, TypeError) as err:
            error(
                "<RRR40417904E>",
                TraceParseError(f"Invalid web search fixture {path}: {err}"),
            )


def record_web_fixture(
    fixtures_dir: str, query: str, documents: Iterable[Document]
) -> str:
    """Store results for `query` so RecordedWebSearch can replay them"""
    os.makedirs(fixtures_dir, exist_ok=True)
    path = os.path.join(fixtures_dir, fixture_name(query))
    payload = {
        "query": query,
        "results": [
            {"id": doc.doc_id, "title": doc.title, "text": doc.body, "score": doc.score}
            for doc in documents
        ],
    }
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(payload, handle, indent=2, ensure_ascii=False)
    return path
