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
"""Construction of the backend and retriever a run configuration names"""

# Standard
from typing import Optional, Sequence

# First Party
from caikit.core.exceptions import error_handler
import alog

# Local
from ..data_model import RunConfig
from ..modules.baselines import get_variant
from ..modules.retrieval import BM25Retriever, RecordedWebSearch, Retriever
from ..resources.chat_backend import (
    CachedChatBackend,
    ChatBackendBase,
    OpenAICompatBackend,
    ResponseCache,
    ScriptedBackend,
)

log = alog.use_channel("CLI")
error = error_handler.get(log)


def build_backend(config: RunConfig) -> ChatBackendBase:
    """Scripted backend when a script is configured, the remote endpoint
    otherwise, behind the response cache when a cache directory is set
    """
    if config.scripted_path:
        backend = ScriptedBackend.from_file(config.scripted_path)
    else:
        backend = OpenAICompatBackend(config.model.endpoint_url)
    if config.cache_dir:
        backend = CachedChatBackend(backend, ResponseCache(config.cache_dir))
    log.debug("Using backend %s", backend.endpoint)
    return backend


def build_retriever(
    config: RunConfig, variants: Optional[Sequence[str]] = None
) -> Optional[Retriever]:
    """Recorded web results when a fixtures directory is set, the BM25 index
    otherwise. None when none of the variants retrieves.
    """
    retrieving = [
        name
        for name in (variants or [config.variant])
        if get_variant(name).uses_retrieval
    ]
    if not retrieving:
        return None
    if config.web_fixtures_dir:
        return RecordedWebSearch(config.web_fixtures_dir)
    error.value_check(
        "<RRR55021310E>",
        bool(config.index_path),
        f"{retrieving[0]} retrieves: set index_path or web_fixtures_dir",
    )
    return BM25Retriever.load(config.index_path)
