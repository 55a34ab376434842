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
"""Okapi BM25 lexical retriever over a local JSONL corpus"""

# Standard
from collections import Counter
from typing import Dict, Iterable, List, Optional, Tuple, Union
import json
import os
import string
import threading

# Third Party
import numpy as np

# First Party
from caikit import get_config
from caikit.core.exceptions import error_handler
from caikit.core.modules import ModuleBase, ModuleConfig, ModuleSaver, module
import alog

# Local
from ...data_model import Document, DocumentSource, RetrieverConfig
from ...exceptions import DuplicateDocId, EmptyCorpus, SchemaError

log = alog.use_channel("BM25")
error = error_handler.get(log)

# Changing tokenize() requires bumping this; saved indexes carry the value
TOKENIZER_VERSION = "1"
INDEX_FORMAT_VERSION = "1"
INDEX_ARTIFACT = "index.json"

_STRIP_PUNCTUATION = str.maketrans("", "", string.punctuation)

DocumentLike = Union[Document, Tuple[str, str, str]]


def tokenize(text: str) -> List[str]:
    """Lowercase, delete ASCII punctuation, split on whitespace"""
    return text.lower().translate(_STRIP_PUNCTUATION).split()


def _as_document(entry: DocumentLike) -> Document:
    if isinstance(entry, Document):
        return entry
    doc_id, title, body = entry
    return Document(doc_id=doc_id, title=title, body=body)


class CorpusIndex:
    """Inverted index with the statistics BM25 needs. Never modified after
    build_index, so concurrent searches need no locking.
    """

    def __init__(
        self,
        documents: Dict[str, Document],
        postings: Dict[str, Dict[str, int]],
        doc_lengths: Dict[str, int],
        k1: float,
        b: float,
        tokenizer_version: str = TOKENIZER_VERSION,
    ):
        self.documents = documents
        self.postings = postings
        self.doc_lengths = doc_lengths
        self.doc_count = len(doc_lengths)
        self.avg_doc_length = (
            float(np.mean(list(doc_lengths.values()))) if doc_lengths else 0.0
        )
        self.k1 = k1
        self.b = b
        self.tokenizer_version = tokenizer_version

        # Dense layout used for scoring, rows in doc_id order
        self._doc_ids = sorted(doc_lengths)
        self._row = {doc_id: row for row, doc_id in enumerate(self._doc_ids)}
        self._lengths = np.array(
            [doc_lengths[doc_id] for doc_id in self._doc_ids], dtype=np.float64
        )

    def idf(self, term: str) -> float:
        """Non-negative idf: ln(1 + (N - n + 0.5) / (n + 0.5))"""
        df = len(self.postings.get(term, {}))
        return float(np.log1p((self.doc_count - df + 0.5) / (df + 0.5)))

    def scores(self, query: str) -> Dict[str, float]:
        """BM25 score of every document for the query, repeated terms counted
        once per occurrence
        """
        totals = np.zeros(self.doc_count, dtype=np.float64)
        if self.avg_doc_length > 0:
            norm = self.k1 * (1 - self.b + self.b * self._lengths / self.avg_doc_length)
        else:
            norm = np.full(self.doc_count, self.k1)
        for term in tokenize(query):
            term_postings = self.postings.get(term)
            if not term_postings:
                continue
            rows = np.array([self._row[doc_id] for doc_id in term_postings])
            tfs = np.array(list(term_postings.values()), dtype=np.float64)
            totals[rows] += (
                self.idf(term) * tfs * (self.k1 + 1) / (tfs + norm[rows])
            )
        return {doc_id: float(totals[row]) for doc_id, row in self._row.items()}

    def search(self, query: str, config: RetrieverConfig) -> List[Document]:
        scored = sorted(
            self.scores(query).items(), key=lambda item: (-item[1], item[0])
        )
        # A score of 0 means no query term occurs in the document
        scored = [
            item for item in scored if item[1] > 0 and item[1] >= config.min_score
        ]
        results = []
        for doc_id, score in scored[: config.top_k]:
            doc = self.documents[doc_id]
            results.append(
                Document(
                    doc_id=doc.doc_id,
                    title=doc.title,
                    body=doc.body,
                    score=score,
                    source=DocumentSource.LOCAL_CORPUS.value,
                )
            )
        return results

    ## Persistence #############################################################

    def to_dict(self) -> dict:
        return {
            "format_version": INDEX_FORMAT_VERSION,
            "tokenizer_version": self.tokenizer_version,
            "k1": self.k1,
            "b": self.b,
            "documents": [
                {"id": doc.doc_id, "title": doc.title, "text": doc.body}
                for doc in (self.documents[doc_id] for doc_id in self._doc_ids)
            ],
            "postings": self.postings,
            "doc_lengths": self.doc_lengths,
        }

    @classmethod
    def from_dict(cls, index_dict: dict) -> "CorpusIndex":
        error.value_check(
            "<RRR12087741E>",
            index_dict.get("format_version") == INDEX_FORMAT_VERSION,
            f"Unsupported index format {index_dict.get('format_version')!r}",
        )
        error.value_check(
            "<RRR12087742E>",
            index_dict.get("tokenizer_version") == TOKENIZER_VERSION,
            f"Index built with tokenizer {index_dict.get('tokenizer_version')!r}, "
            f"current tokenizer is {TOKENIZER_VERSION!r}; rebuild the index",
        )
        documents = {
            entry["id"]: Document(
                doc_id=entry["id"], title=entry["title"], body=entry["text"]
            )
            for entry in index_dict["documents"]
        }
        return cls(
            documents=documents,
            postings={
                term: {doc_id: int(tf) for doc_id, tf in entries.items()}
                for term, entries in index_dict["postings"].items()
            },
            doc_lengths={
                doc_id: int(length)
                for doc_id, length in index_dict["doc_lengths"].items()
            },
            k1=float(index_dict["k1"]),
            b=float(index_dict["b"]),
            tokenizer_version=index_dict["tokenizer_version"],
        )


def build_index(
    documents: Iterable[DocumentLike],
    k1: Optional[float] = None,
    b: Optional[float] = None,
) -> CorpusIndex:
    """Build a CorpusIndex over the title and body of every document

    Args:
        documents: Iterable[DocumentLike]
            Documents or (doc_id, title, body) triples
        k1: Optional[float]
            Term frequency saturation, library default when None
        b: Optional[float]
            Length normalization, library default when None

    Returns:
        CorpusIndex

    Raises:
        DuplicateDocId when two documents share an id
        EmptyCorpus when no documents are given
    """
    retrieval_cfg = get_config().retrieval
    k1 = float(retrieval_cfg.k1 if k1 is None else k1)
    b = float(retrieval_cfg.b if b is None else b)

    stored: Dict[str, Document] = {}
    postings: Dict[str, Dict[str, int]] = {}
    doc_lengths: Dict[str, int] = {}
    for entry in documents:
        doc = _as_document(entry)
        error.type_check("<RRR12087743E>", str, doc_id=doc.doc_id, body=doc.body)
        if doc.doc_id in stored:
            error("<RRR12087744E>", DuplicateDocId(doc.doc_id))
        error.value_check(
            "<RRR12087745E>",
            doc.body.strip() != "",
            f"Document {doc.doc_id} has an empty body",
        )
        stored[doc.doc_id] = doc
        tokens = tokenize(f"{doc.title or ''} {doc.body}")
        doc_lengths[doc.doc_id] = len(tokens)
        for term, count in Counter(tokens).items():
            postings.setdefault(term, {})[doc.doc_id] = count

    if not stored:
        error("<RRR12087746E>", EmptyCorpus("Cannot build an index without documents"))
    log.debug("Indexed %d documents, %d terms", len(stored), len(postings))
    return CorpusIndex(stored, postings, doc_lengths, k1=k1, b=b)


def load_corpus_jsonl(path: str) -> List[Document]:
    """Read a corpus file with one {"id", "title", "text"} object per line

    Raises:
        FileNotFoundError when the file does not exist
        SchemaError listing every malformed line
    """
    error.file_check("<RRR12087747E>", path)
    documents = []
    bad_lines = []
    details = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                doc_id, text = entry["id"], entry["text"]
                if not isinstance(doc_id, str) or not isinstance(text, str):
                    raise TypeError("id and text must be strings")
                if not text.strip():
                    raise ValueError("text is empty")
            except (ValueError, KeyError, TypeError) as err:
                bad_lines.append(line_number)
                details.append(f"line {line_number}: {err}")
                continue
            documents.append(
                Document(doc_id=doc_id, title=entry.get("title") or "", body=text)
            )
    if bad_lines:
        error("<RRR12087748E>", SchemaError(path, bad_lines, details))
    return documents


@module(
    id="5b2f4e0c-93a1-4c3e-b7b8-0f6d4f1c2a71",
    name="BM25 Retriever",
    version="0.1.0",
)
class BM25Retriever(ModuleBase):
    """Ranks a local corpus with Okapi BM25"""

    def __init__(self, index: CorpusIndex):
        super().__init__()
        error.type_check("<RRR12087749E>", CorpusIndex, index=index)
        self.index = index
        self._access_count = 0
        self._access_lock = threading.Lock()

    @property
    def access_count(self) -> int:
        """Number of searches run against the index"""
        return self._access_count

    @classmethod
    def train(
        cls,
        documents: Iterable[DocumentLike],
        k1: Optional[float] = None,
        b: Optional[float] = None,
    ) -> "BM25Retriever":
        """Index the given documents"""
        return cls(build_index(documents, k1=k1, b=b))

    @classmethod
    def bootstrap(cls, corpus_path: str) -> "BM25Retriever":
        """Index a JSONL corpus file"""
        return cls.train(load_corpus_jsonl(corpus_path))

    def save(self, model_path: str):
        """Save the index in target path

        Args:
            model_path: str
                Directory for config.yml and the index artifact
        """
        error.type_check("<RRR12087750E>", str, model_path=model_path)
        os.makedirs(model_path, exist_ok=True)
        module_saver = ModuleSaver(self, model_path=model_path)
        with module_saver:
            module_saver.update_config(
                {
                    "artifact": INDEX_ARTIFACT,
                    "format_version": INDEX_FORMAT_VERSION,
                    "tokenizer_version": self.index.tokenizer_version,
                    "doc_count": self.index.doc_count,
                }
            )
            with open(
                os.path.join(model_path, INDEX_ARTIFACT), "w", encoding="utf-8"
            ) as handle:
                json.dump(self.index.to_dict(), handle, sort_keys=True)

    @classmethod
    def load(cls, model_path: str) -> "BM25Retriever":
        """Load a saved BM25 index

        Args:
            model_path: str
                Directory written by save()

        Returns:
            BM25Retriever
        """
        error.dir_check("<RRR12087751E>", model_path)
        config = ModuleConfig.load(os.path.abspath(model_path))
        artifact_path = os.path.join(model_path, config.get("artifact", INDEX_ARTIFACT))
        error.file_check("<RRR12087752E>", artifact_path)
        with open(artifact_path, "r", encoding="utf-8") as handle:
            index = CorpusIndex.from_dict(json.load(handle))
        return cls(index)

    def search(self, query: str, config: RetrieverConfig) -> List[Document]:
        error.type_check("<RRR12087753E>", str, query=query)
        with self._access_lock:
            self._access_count += 1
        return self.index.search(query, config)

    def run(
        self, query: str, top_k: Optional[int] = None, min_score: float = 0.0
    ) -> List[Document]:
        """Top documents for the query

        Args:
            query: str
                Free text query
            top_k: Optional[int]
                Maximum number of results, library default when None
            min_score: float
                Drop results scoring below this value, 0 disables it

        Returns:
            List[Document]
                Best first, ties ordered by doc_id
        """
        if top_k is None:
            top_k = int(get_config().retrieval.default_top_k)
        config = RetrieverConfig(top_k=top_k, min_score=min_score)
        validate_retriever_config(config)
        return self.search(query, config)


def validate_retriever_config(config: RetrieverConfig):
    error.type_check("<RRR12087754E>", RetrieverConfig, config=config)
    error.type_check("<RRR12087755E>", int, top_k=config.top_k)
    error.value_check(
        "<RRR12087756E>", config.top_k >= 1, f"top_k must be >= 1, got {config.top_k}"
    )
    error.value_check(
        "<RRR12087757E>",
        config.min_score >= 0,
        f"min_score must be >= 0, got {config.min_score}",
    )
