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
"""Operator surface: index, ask, eval, ablate and trace commands"""

# Local
from .commands import (
    cmd_ablate,
    cmd_ask,
    cmd_eval,
    cmd_index,
    cmd_trace,
    render_trace,
    run_manifest,
    write_manifest,
)
from .components import build_backend, build_retriever
from .main import build_parser, main
from .run_config import load_run_config, read_config_file
