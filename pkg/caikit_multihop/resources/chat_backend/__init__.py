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
"""Chat completion backends: remote, scripted and cached"""

# Local
from .base import (
    ChatBackendBase,
    MessageLike,
    default_model_config,
    to_messages,
    validate_messages,
    validate_model_config,
)
from .cache import CachedChatBackend, ResponseCache, cache_key
from .openai_compat import OpenAICompatBackend
from .scripted import ScriptedBackend, ScriptRule, scripted_backend
