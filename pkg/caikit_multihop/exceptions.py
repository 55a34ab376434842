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
"""Domain exceptions raised by the multi-hop pipeline.

All of them are CaikitCoreExceptions so callers that already translate caikit
status codes (runtime servers, CLIs) keep working.
"""
# Standard
from typing import Any, Iterable, List, Optional

# First Party
from caikit.core.exceptions.caikit_core_exception import (
    CaikitCoreException,
    CaikitCoreStatusCode,
)


class MultihopError(CaikitCoreException):
    """Base class for all errors raised by caikit_multihop"""

    STATUS_CODE = CaikitCoreStatusCode.UNKNOWN

    def __init__(self, message: str):
        self.message = message
        super().__init__(self.STATUS_CODE, message)

    def __str__(self) -> str:
        return self.message


## Chat backends ###############################################################


class BackendError(MultihopError):
    """Failure talking to a chat completion endpoint"""

    def __init__(self, message: str, endpoint: str, attempts: int):
        self.endpoint = endpoint
        self.attempts = attempts
        super().__init__(f"{message} [endpoint={endpoint}, attempts={attempts}]")


class TransportError(BackendError):
    STATUS_CODE = CaikitCoreStatusCode.CONNECTION_ERROR


class RateLimited(BackendError):
    STATUS_CODE = CaikitCoreStatusCode.CONNECTION_ERROR


class MalformedResponse(BackendError):
    STATUS_CODE = CaikitCoreStatusCode.UNKNOWN


class AuthError(BackendError):
    STATUS_CODE = CaikitCoreStatusCode.UNAUTHORIZED


class ScriptExhausted(MultihopError):
    STATUS_CODE = CaikitCoreStatusCode.NOT_FOUND


class NoMatchingRule(MultihopError):
    STATUS_CODE = CaikitCoreStatusCode.NOT_FOUND


## Reasoning state machine #####################################################


class StateMachineViolation(MultihopError):
    STATUS_CODE = CaikitCoreStatusCode.INVALID_ARGUMENT


class StepOrderingError(MultihopError):
    STATUS_CODE = CaikitCoreStatusCode.INVALID_ARGUMENT


class ModelOutputUnparseable(MultihopError):
    STATUS_CODE = CaikitCoreStatusCode.INVALID_ARGUMENT

    def __init__(self, message: str, raw_text: str = ""):
        self.raw_text = raw_text
        super().__init__(message)


class RefineEmpty(MultihopError):
    STATUS_CODE = CaikitCoreStatusCode.INVALID_ARGUMENT


class AggregationEmpty(MultihopError):
    STATUS_CODE = CaikitCoreStatusCode.INVALID_ARGUMENT


class LoopLimitExceeded(MultihopError):
    """An iterative baseline ran out of iterations without a final answer"""

    STATUS_CODE = CaikitCoreStatusCode.UNKNOWN


class StepFailed(MultihopError):
    """A step failed after retries. The partial trace is kept for inspection."""

    STATUS_CODE = CaikitCoreStatusCode.UNKNOWN

    def __init__(self, step_index: int, cause: Exception, partial_trace: Any = None):
        self.step_index = step_index
        self.cause = cause
        self.partial_trace = partial_trace
        super().__init__(f"step {step_index} failed: {cause}")


## Retrieval ###################################################################


class DuplicateDocId(MultihopError):
    STATUS_CODE = CaikitCoreStatusCode.INVALID_ARGUMENT

    def __init__(self, doc_id: str):
        self.doc_id = doc_id
        super().__init__(f"Duplicate document id: {doc_id}")


class EmptyCorpus(MultihopError):
    STATUS_CODE = CaikitCoreStatusCode.INVALID_ARGUMENT


## Evaluation ##################################################################


class SchemaError(MultihopError):
    STATUS_CODE = CaikitCoreStatusCode.INVALID_ARGUMENT

    def __init__(
        self,
        path: str,
        line_numbers: Iterable[int],
        details: Optional[List[str]] = None,
    ):
        self.path = path
        self.line_numbers = sorted(line_numbers)
        self.details = details or []
        lines = ", ".join(str(num) for num in self.line_numbers)
        super().__init__(f"Malformed records in {path} at line(s) {lines}")


class UnmatchedTrace(MultihopError):
    STATUS_CODE = CaikitCoreStatusCode.NOT_FOUND

    def __init__(self, orphan_ids: Iterable[str]):
        self.orphan_ids = sorted(orphan_ids)
        orphans = ", ".join(self.orphan_ids)
        super().__init__(f"Traces without a matching record: {orphans}")


class TraceParseError(MultihopError):
    STATUS_CODE = CaikitCoreStatusCode.INVALID_ARGUMENT
