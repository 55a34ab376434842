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
"""Serialization, digests and call recording for pipeline traces"""

# Standard
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import Any, Dict, Iterable, List
import hashlib
import json
import os
import re
import threading
import time

# First Party
from caikit.core.exceptions import error_handler
import alog

# Local
from ..data_model import (
    BackendCall,
    CallKind,
    ChatMessage,
    Document,
    PipelineTrace,
    StepTiming,
)
from ..exceptions import TraceParseError

log = alog.use_channel("TRACE")
error = error_handler.get(log)

# Wall-clock fields that differ between otherwise identical runs
VOLATILE_TRACE_FIELDS = ("timing", "started_at", "finished_at")


def canonical_json(payload: Any) -> str:
    """Order-stable compact JSON used for every digest"""
    return json.dumps(
        payload, sort_keys=True, ensure_ascii=False, separators=(",", ":")
    )


def digest(payload: Any) -> str:
    """sha256 hex digest of a string or of the canonical JSON of a payload"""
    text = payload if isinstance(payload, str) else canonical_json(payload)
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def messages_payload(messages: Iterable[ChatMessage]) -> List[Dict[str, str]]:
    return [{"role": msg.role, "content": msg.content} for msg in messages]


def now_rfc3339() -> str:
    return (
        datetime.now(timezone.utc)
        .isoformat(timespec="milliseconds")
        .replace("+00:00", "Z")
    )


class TraceRecorder:
    """Collects the backend call log and step timings of one pipeline run.

    One run is sequential, but the lock keeps the log consistent when a
    recorder is shared with helpers running on other threads.
    """

    def __init__(self):
        self.calls: List[BackendCall] = []
        self.timing: List[StepTiming] = []
        self.step_index = 0
        self._lock = threading.Lock()

    @contextmanager
    def step(self, index: int):
        """Attribute calls to step `index` and time it"""
        previous = self.step_index
        self.step_index = index
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            with self._lock:
                self.timing.append(StepTiming(step_index=index, seconds=elapsed))
            self.step_index = previous

    def record_model_call(
        self, purpose: str, messages: Iterable[ChatMessage], response_text: str
    ):
        call = BackendCall(
            kind=CallKind.MODEL.value,
            purpose=purpose,
            step_index=self.step_index,
            prompt_digest=digest(messages_payload(messages)),
            response_digest=digest(response_text),
            response_text=response_text,
            doc_ids=[],
        )
        with self._lock:
            self.calls.append(call)

    def record_retrieval(self, query: str, documents: Iterable[Document]):
        doc_ids = [doc.doc_id for doc in documents]
        call = BackendCall(
            kind=CallKind.RETRIEVER.value,
            purpose="retrieve",
            step_index=self.step_index,
            prompt_digest=digest(query),
            response_digest=digest(doc_ids),
            response_text="",
            doc_ids=doc_ids,
        )
        with self._lock:
            self.calls.append(call)

    @property
    def retrieval_count(self) -> int:
        return count_retrievals(self.calls)


def count_retrievals(calls: Iterable[BackendCall]) -> int:
    return sum(1 for call in calls if call.kind == CallKind.RETRIEVER.value)


## Serialization ###############################################################


def canonical_trace_dict(trace: PipelineTrace) -> Dict[str, Any]:
    """Trace as a dict without the wall-clock fields"""
    trace_dict = trace.to_dict()
    for field_name in VOLATILE_TRACE_FIELDS:
        trace_dict.pop(field_name, None)
    return trace_dict


def canonical_trace_json(trace: PipelineTrace) -> str:
    return canonical_json(canonical_trace_dict(trace))


def trace_file_name(trace: PipelineTrace) -> str:
    question_id = trace.query.question_id or digest(trace.query.question_text)[:16]
    safe_id = re.sub(r"[^A-Za-z0-9._-]", "_", question_id)
    return f"{safe_id}.{trace.variant}.json"


def write_trace(trace: PipelineTrace, output_dir: str) -> str:
    """Write one trace as a JSON file under `output_dir` and return its path"""
    os.makedirs(output_dir, exist_ok=True)
    path = os.path.join(output_dir, trace_file_name(trace))
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(
            trace.to_dict(), handle, indent=2, sort_keys=True, ensure_ascii=False
        )
        handle.write("\n")
    log.debug("Trace written to %s", path)
    return path


def trace_from_dict(trace_dict: Dict[str, Any]) -> PipelineTrace:
    for key in ("query", "steps", "final_answer"):
        if key not in trace_dict:
            error("<RRR70381225E>", TraceParseError(f"Trace is missing {key!r}"))
    try:
        return PipelineTrace.from_json(json.dumps(trace_dict))
    except Exception as err:  # pylint: disable=broad-exception-caught
        error("<RRR70381226E>", TraceParseError(f"Invalid trace: {err}"))


def read_trace(path: str) -> PipelineTrace:
    """Load a trace written by write_trace

    Raises:
        TraceParseError if the file is not a valid trace
    """
    error.file_check("<RRR70381227E>", path)
    with open(path, "r", encoding="utf-8") as handle:
        text = handle.read()
    try:
        trace_dict = json.loads(text)
    except json.JSONDecodeError as err:
        error("<RRR70381228E>", TraceParseError(f"{path}: {err}"))
    if not isinstance(trace_dict, dict):
        error("<RRR70381229E>", TraceParseError(f"{path}: not a JSON object"))
    return trace_from_dict(trace_dict)
