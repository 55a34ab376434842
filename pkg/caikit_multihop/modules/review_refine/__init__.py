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

# Local
from .pipeline import PipelineSwitches, run_review_refine
from .refine import aggregate, refine_step_answer
from .review import (
    FINAL_MARKER,
    NEED_RETRIEVAL_MARKER,
    ReviewMode,
    parse_plan,
    parse_review_output,
    plan_decomposition,
    review_step,
)
