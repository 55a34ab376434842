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
from .datasets import DatasetProfile, dataset_profile, load_dataset, sample
from .judge import LLMJudge
from .metrics import is_correct, normalize_answer, token_f1
from .report import (
    render_csv,
    render_text,
    report_json,
    rows_frame,
    summary_frame,
    write_ablation_table,
    write_report,
)
from .scoring import evaluate
