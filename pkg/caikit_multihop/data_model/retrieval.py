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
"""Data structures for retrieved passages
"""
# Standard
from enum import Enum

# First Party
from caikit.core import DataObjectBase

# First party
import alog
import caikit

log = alog.use_channel("DATAM")


class DocumentSource(Enum):
    LOCAL_CORPUS = "local_corpus"
    WEB = "web"


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class Document(DataObjectBase):
    doc_id: str
    title: str
    body: str
    # Only meaningful once the document came back from a retriever
    score: float = 0.0
    source: str = DocumentSource.LOCAL_CORPUS.value


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class RetrieverConfig(DataObjectBase):
    top_k: int = 3
    # 0 disables the threshold
    min_score: float = 0.0
