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
"""Common data model containing all data structures that are passed between
the pipeline phases, the backends and the evaluation harness.
"""

# Local
from . import evaluation, llm, reasoning, retrieval, run_config
from .evaluation import *
from .llm import *
from .reasoning import *
from .retrieval import *
from .run_config import *
