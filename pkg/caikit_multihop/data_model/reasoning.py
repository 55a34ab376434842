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
"""Data structures for the reasoning chain of a single question
"""
# Standard
from enum import Enum
from typing import List, Optional

# First Party
from caikit.core import DataObjectBase

# First party
import alog
import caikit

# Local
from .retrieval import Document

log = alog.use_channel("DATAM")


class TraceStatus(Enum):
    COMPLETED = "completed"
    ABORTED = "aborted"


class CallKind(Enum):
    MODEL = "model"
    RETRIEVER = "retriever"


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class OriginalQuery(DataObjectBase):
    question_text: str
    context: Optional[str] = None
    # ISO calendar date (YYYY-MM-DD) the question is asked "as of"
    temporal_anchor: Optional[str] = None
    question_id: str = ""


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class SubQueryStep(DataObjectBase):
    index: int
    rewritten_query: str
    anticipated_answer: str = ""
    needs_retrieval: bool = False
    documents: List[Document] = None
    refined_answer: str = ""
    # Set when the review model asked to stop after this step
    terminate: bool = False


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class ReasoningState(DataObjectBase):
    """Never mutated in place, see toolkit.reasoning_state.transition"""

    query: OriginalQuery
    completed_steps: List[SubQueryStep]
    terminal: bool
    step_budget: int


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class StepTiming(DataObjectBase):
    step_index: int
    seconds: float


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class BackendCall(DataObjectBase):
    kind: str
    purpose: str
    # 0 for calls outside of a step (planning, aggregation)
    step_index: int
    prompt_digest: str
    response_digest: str
    # Model calls keep the response so a trace can be replayed offline
    response_text: str = ""
    doc_ids: List[str] = None


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class PipelineTrace(DataObjectBase):
    query: OriginalQuery
    steps: List[SubQueryStep]
    final_answer: str
    model_config_digest: str
    timing: List[StepTiming]
    backend_call_log: List[BackendCall]
    variant: str = "rrr_full"
    plan: List[str] = None
    status: str = TraceStatus.COMPLETED.value
    error: str = ""
    # RFC-3339
    started_at: str = ""
    finished_at: str = ""


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class ReviewOutcome(DataObjectBase):
    """Parsed review response. An empty rewritten_query with terminate set
    means the history already answers the question.
    """

    rewritten_query: str
    anticipated_answer: str
    needs_retrieval: bool
    terminate: bool
    raw_model_text: str


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class SubAnswer(DataObjectBase):
    query: str
    answer: str


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class AggregationInput(DataObjectBase):
    original_question: str
    sub_answers: List[SubAnswer]
    temporal_anchor: Optional[str] = None
