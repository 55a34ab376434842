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
"""Persistent response cache keyed by a digest of the request.

Cached entries are complete ChatExchanges stored as one JSON file per digest,
so an interrupted evaluation can resume without repeating remote calls.
"""

# Standard
from concurrent.futures import Future
from typing import Callable, Dict, Iterable, List, Optional
import json
import os
import tempfile
import threading

# First Party
from caikit.core.exceptions import error_handler
import alog

# Local
from ...data_model import ChatExchange, ChatMessage, ModelConfig
from ...toolkit.trace_utils import digest, messages_payload
from .base import ChatBackendBase, MessageLike, to_messages

log = alog.use_channel("RESPCACHE")
error = error_handler.get(log)


def cache_key(config: ModelConfig, messages: Iterable[MessageLike]) -> str:
    """Stable digest over the model identity, the sampling parameters and the
    ordered messages
    """
    canonical = [
        {"role": msg["role"].strip().lower(), "content": msg["content"]}
        for msg in messages_payload(to_messages(messages))
    ]
    return digest(
        {
            "model_name": config.model_name,
            "temperature": float(config.temperature),
            "top_p": float(config.top_p),
            "messages": canonical,
        }
    )


class ResponseCache:
    """Digest -> ChatExchange store. Without a directory it only lives in
    memory. Concurrent requests for the same key compute the value once.
    """

    def __init__(self, cache_dir: Optional[str] = None):
        self.cache_dir = cache_dir
        if cache_dir:
            os.makedirs(cache_dir, exist_ok=True)
        self.hits = 0
        self.misses = 0
        self._memory: Dict[str, ChatExchange] = {}
        self._inflight: Dict[str, Future] = {}
        self._lock = threading.Lock()

    def _path(self, key: str) -> str:
        return os.path.join(self.cache_dir, f"{key}.json")

    def _count(self, hit: bool):
        with self._lock:
            if hit:
                self.hits += 1
            else:
                self.misses += 1

    def get(self, key: str) -> Optional[ChatExchange]:
        with self._lock:
            if key in self._memory:
                return self._memory[key]
        if not self.cache_dir or not os.path.exists(self._path(key)):
            return None
        try:
            with open(self._path(key), "r", encoding="utf-8") as handle:
                exchange = ChatExchange.from_json(handle.read())
        except Exception as err:  # pylint: disable=broad-exception-caught
            log.warning("<RRR48207731W>", f"Ignoring corrupt cache entry {key}: {err}")
            return None
        with self._lock:
            self._memory[key] = exchange
        return exchange

    def put(self, key: str, exchange: ChatExchange):
        with self._lock:
            self._memory[key] = exchange
        if not self.cache_dir:
            return
        # Write to a temp file first so readers never see partial entries
        handle, tmp_path = tempfile.mkstemp(dir=self.cache_dir, suffix=".tmp")
        with os.fdopen(handle, "w", encoding="utf-8") as tmp_file:
            json.dump(exchange.to_dict(), tmp_file, sort_keys=True, ensure_ascii=False)
        os.replace(tmp_path, self._path(key))

    def get_or_compute(
        self, key: str, compute: Callable[[], ChatExchange]
    ) -> ChatExchange:
        """Return the cached exchange or compute, store and return it"""
        with self._lock:
            future = self._inflight.get(key)
            owner = future is None
            if owner:
                future = Future()
                self._inflight[key] = future
        if not owner:
            log.debug2("Waiting on in-flight request %s", key)
            exchange = future.result()
            self._count(hit=True)
            return exchange

        try:
            exchange = self.get(key)
            self._count(hit=exchange is not None)
            if exchange is None:
                exchange = compute()
                self.put(key, exchange)
            future.set_result(exchange)
            return exchange
        except BaseException as err:
            future.set_exception(err)
            raise
        finally:
            with self._lock:
                self._inflight.pop(key, None)


class CachedChatBackend(ChatBackendBase):
    """Wraps another backend and answers repeated requests from the cache"""

    def __init__(self, backend: ChatBackendBase, cache: ResponseCache):
        super().__init__()
        error.type_check("<RRR48207732E>", ChatBackendBase, backend=backend)
        error.type_check("<RRR48207733E>", ResponseCache, cache=cache)
        self.backend = backend
        self.cache = cache

    @property
    def endpoint(self) -> str:
        return self.backend.endpoint

    @property
    def ordered_replay(self) -> bool:
        return self.backend.ordered_replay

    def _complete(
        self, config: ModelConfig, messages: List[ChatMessage]
    ) -> ChatExchange:
        key = cache_key(config, messages)
        return self.cache.get_or_compute(
            key, lambda: self.backend.complete(config, messages)
        )
