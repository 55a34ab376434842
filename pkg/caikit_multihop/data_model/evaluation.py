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
"""Data structures for benchmark records and scored reports
"""
# Standard
from enum import Enum
from typing import List, Optional

# First Party
from caikit.core import DataObjectBase

# First party
import alog
import caikit

log = alog.use_channel("DATAM")


class HopClass(Enum):
    SINGLE_HOP = "single_hop"
    MULTI_HOP = "multi_hop"


class DatasetKind(Enum):
    FRESHQA = "freshqa"
    PAT_QUESTIONS = "pat_questions"
    TWO_WIKI = "two_wiki"
    MULTIHOP_RAG = "multihop_rag"
    CUSTOM = "custom"


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class EvalRecord(DataObjectBase):
    record_id: str
    question: str
    gold_answers: List[str]
    hop_class: str
    dataset: str
    temporal_anchor: Optional[str] = None


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class EvalRow(DataObjectBase):
    record_id: str
    hop_class: str
    prediction: str
    gold_answers: List[str]
    correct: bool
    f1: float
    retrievals: int = 0
    status: str = "completed"


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class EvalReport(DataObjectBase):
    dataset: str
    variant: str
    seed: int
    sample_size: int
    single_hop_accuracy: float
    multi_hop_accuracy: float
    overall_accuracy: float
    mean_f1: float
    single_hop_count: int
    multi_hop_count: int
    total_retrievals: int
    failed_count: int
    rows: List[EvalRow]
    grading: str = "match"
