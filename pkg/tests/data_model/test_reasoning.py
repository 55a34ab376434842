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
from caikit_multihop.data_model import (
    Document,
    ModelConfig,
    OriginalQuery,
    RetrieverConfig,
    SubQueryStep,
)

## Setup #########################################################################

dummy_step = SubQueryStep(
    index=1,
    rewritten_query="Who is the most-followed user on TikTok as of June 2024?",
    anticipated_answer="[need_retrieval]",
    needs_retrieval=True,
    documents=[
        Document(
            doc_id="tiktok-top10",
            title="Most-followed TikTok accounts 2024",
            body="Khaby Lame leads with 162.3 million followers.",
            score=2.5,
        )
    ],
    refined_answer="Khaby Lame.",
)

## Tests ########################################################################

### OriginalQuery
def test_original_query_defaults():
    query = OriginalQuery(question_text="Who is the CEO of Twitter?")
    assert query.context is None
    assert query.temporal_anchor is None
    assert query.question_id == ""


### SubQueryStep
def test_sub_query_step_all_fields_accessible():
    assert dummy_step.index == 1
    assert dummy_step.needs_retrieval
    assert dummy_step.documents[0].source == "local_corpus"
    assert not dummy_step.terminate


def test_sub_query_step_from_json_and_back():
    new = SubQueryStep.from_json(dummy_step.to_json())
    assert new.rewritten_query == dummy_step.rewritten_query
    assert new.documents[0].doc_id == "tiktok-top10"
    assert new.documents[0].score == 2.5
    assert new.refined_answer == "Khaby Lame."


### Configs
def test_model_config_defaults():
    config = ModelConfig(model_name="gpt-3.5-turbo")
    assert config.temperature == 0.3
    assert config.api_key_ref == "OPENAI_API_KEY"
    assert "api_key" not in ModelConfig.__annotations__


def test_retriever_config_defaults():
    config = RetrieverConfig()
    assert config.top_k == 3
    assert config.min_score == 0.0
