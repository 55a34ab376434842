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
"""Gated retrieval and rendering of retrieved documents into prompt context"""

# Standard
from typing import List, Optional, Sequence, Union
import re

# First Party
from caikit import get_config
from caikit.core.exceptions import error_handler
import alog

# Local
from ...data_model import Document, RetrieverConfig
from ...toolkit.trace_utils import TraceRecorder
from .bm25_retriever import BM25Retriever, validate_retriever_config
from .web_search import WebSearchAdapter

log = alog.use_channel("RETRIEVE")
error = error_handler.get(log)

Retriever = Union[BM25Retriever, WebSearchAdapter]

MIN_SNIPPET_CHARS = 100

_LAST_WHITESPACE = re.compile(r"\s(?=\S*$)")


def retrieve(
    retriever: Optional[Retriever],
    query: str,
    indicator: bool,
    config: RetrieverConfig,
    recorder: Optional[TraceRecorder] = None,
) -> List[Document]:
    """Documents for the query when the indicator is set, else nothing

    Args:
        retriever: Optional[Retriever]
            BM25 index or web search adapter
        query: str
            The (rewritten) sub-query
        indicator: bool
            Whether the step asked for retrieval
        config: RetrieverConfig
            top_k and score threshold
        recorder: Optional[TraceRecorder]
            Call log of the running pipeline

    Returns:
        List[Document]
            At most top_k documents, best first
    """
    validate_retriever_config(config)
    if not indicator:
        return []
    error.value_check(
        "<RRR77265018E>",
        retriever is not None,
        "Retrieval was requested but no retriever is configured",
    )
    documents = retriever.search(query, config)
    log.debug2("Retrieved %d documents for %r", len(documents), query)
    if recorder is not None:
        recorder.record_retrieval(query, documents)
    return documents


def _truncate(text: str, limit: int) -> str:
    if len(text) <= limit:
        return text
    cut = text[:limit]
    if not text[limit].isspace():
        match = _LAST_WHITESPACE.search(cut)
        cut = cut[: match.start()] if match else ""
    return cut.rstrip()


def snippet(documents: Sequence[Document], max_chars: Optional[int] = None) -> str:
    """Render documents as numbered blocks with a source line each

    The result never exceeds max_chars; the last block is cut at a whitespace
    boundary and later documents are dropped.
    """
    if max_chars is None:
        max_chars = int(get_config().retrieval.snippet_max_chars)
    error.value_check(
        "<RRR77265019E>",
        max_chars >= MIN_SNIPPET_CHARS,
        f"max_chars must be >= {MIN_SNIPPET_CHARS}, got {max_chars}",
    )
    rendered = ""
    for number, doc in enumerate(documents, start=1):
        title = doc.title or doc.doc_id
        header = f"[{number}] {title} (source: {doc.source}, id: {doc.doc_id})"
        block = f"{header}\n{doc.body.strip()}"
        separator = "\n\n" if rendered else ""
        available = max_chars - len(rendered) - len(separator)
        if len(block) <= available:
            rendered += separator + block
            continue
        if available <= len(header):
            break
        block = _truncate(block, available)
        if len(block) > len(header):
            rendered += separator + block
        break
    return rendered
