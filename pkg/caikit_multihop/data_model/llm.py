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
"""Data structures for chat completion requests and responses
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


class MessageRole(Enum):
    SYSTEM = "system"
    USER = "user"
    ASSISTANT = "assistant"


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class ModelConfig(DataObjectBase):
    """Decoding parameters of one chat model. The API key itself is never
    stored here, only the name of the env var it is read from.
    """

    model_name: str
    temperature: float = 0.3
    top_p: float = 1.0
    max_output_tokens: int = 512
    endpoint_url: str = ""
    api_key_ref: str = "OPENAI_API_KEY"
    timeout_seconds: float = 60.0
    deadline_seconds: float = 240.0
    max_retries: int = 3
    backoff_seconds: float = 1.0


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class ChatMessage(DataObjectBase):
    role: str
    content: str


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class TokenUsage(DataObjectBase):
    prompt_tokens: int = 0
    completion_tokens: int = 0
    total_tokens: int = 0


@caikit.core.dataobject(package="caikit_data_model.caikit_multihop")
class ChatExchange(DataObjectBase):
    messages: List[ChatMessage]
    response_text: str
    usage: Optional[TokenUsage] = None
    latency_seconds: float = 0.0
