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
"""Data structures for configuring a pipeline run
"""
# Standard
from typing import Optional

# First Party
from caikit.core import DataObjectBase

# First party
import alog
import caikit

# Local
from .llm import ModelConfig
from .retrieval import RetrieverConfig

log = alog.use_channel("DATAM")


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class RunConfig(DataObjectBase):
    model: ModelConfig
    retriever: RetrieverConfig
    step_budget: int = 8
    variant: str = "rrr_full"
    dataset_path: Optional[str] = None
    dataset_kind: str = "custom"
    sample_size: int = 500
    seed: int = 7
    # BM25 model directory written by the `index` command
    index_path: Optional[str] = None
    # Recorded web search fixtures, used instead of the index when set
    web_fixtures_dir: Optional[str] = None
    cache_dir: Optional[str] = None
    output_dir: str = "runs"
    concurrency: int = 4
    snippet_max_chars: int = 4000
    # Transcript / rules file for the scripted backend, replaces the endpoint
    scripted_path: Optional[str] = None
    judge: bool = False
