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
"""Registry of the pipelines a run can select with --variant"""

# Standard
from enum import Enum
from typing import Dict, List, NamedTuple, Tuple

# First Party
from caikit.core.exceptions import error_handler
import alog

log = alog.use_channel("VARIANTS")
error = error_handler.get(log)


class VariantName(Enum):
    VANILLA = "vanilla"
    VANILLA_WITH_CONTEXT = "vanilla_with_context"
    COT = "cot"
    FRESHPROMPT = "freshprompt"
    CHAIN_OF_NOTE = "chain_of_note"
    SELF_ASK = "self_ask"
    REACT = "react"
    SEARCHAIN = "searchain"
    RRR_FULL = "rrr_full"
    RRR_NO_DECOMPOSE = "rrr_no_decompose"
    RRR_NO_RETRIEVAL = "rrr_no_retrieval"
    RRR_NO_REWRITE = "rrr_no_rewrite"
    SELF_ASK_NO_RETRIEVAL = "self_ask_no_retrieval"
    SEARCHAIN_NO_RETRIEVAL = "searchain_no_retrieval"


class PipelineVariant(NamedTuple):
    name: str
    template_set: Tuple[str, ...]
    uses_retrieval: bool


_REVIEW_REPROMPTS = ("reprompt_format", "reprompt_anchor", "reprompt_plan")
_REFINE = ("refine_with_context", "refine_internal", "aggregate")

VARIANTS: Dict[str, PipelineVariant] = {
    variant.name: variant
    for variant in [
        PipelineVariant("vanilla", ("vanilla",), False),
        PipelineVariant("vanilla_with_context", ("vanilla_with_context",), True),
        PipelineVariant("cot", ("cot",), False),
        PipelineVariant("freshprompt", ("freshprompt",), True),
        PipelineVariant("chain_of_note", ("chain_of_note",), True),
        PipelineVariant(
            "self_ask",
            ("self_ask", "reprompt_self_ask", "vanilla_with_context"),
            True,
        ),
        PipelineVariant("react", ("react", "reprompt_react", "vanilla"), True),
        PipelineVariant(
            "searchain",
            ("searchain", "reprompt_searchain", "searchain_verify"),
            True,
        ),
        PipelineVariant(
            "rrr_full", ("plan", "review") + _REVIEW_REPROMPTS + _REFINE, True
        ),
        PipelineVariant(
            "rrr_no_decompose",
            ("review", "reprompt_format", "reprompt_anchor") + _REFINE,
            True,
        ),
        PipelineVariant(
            "rrr_no_retrieval",
            ("plan", "review_no_retrieval")
            + _REVIEW_REPROMPTS
            + ("refine_internal", "aggregate"),
            False,
        ),
        PipelineVariant(
            "rrr_no_rewrite",
            ("plan", "review_fixed_query", "reprompt_format", "reprompt_plan")
            + _REFINE,
            True,
        ),
        PipelineVariant(
            "self_ask_no_retrieval", ("self_ask", "reprompt_self_ask", "vanilla"), False
        ),
        PipelineVariant(
            "searchain_no_retrieval", ("searchain", "reprompt_searchain"), False
        ),
    ]
}


def variant_names() -> List[str]:
    return [name.value for name in VariantName]


def get_variant(name: str) -> PipelineVariant:
    """Look up a registered variant

    Raises:
        ValueError for unknown names
    """
    error.type_check("<RRR85526301E>", str, name=name)
    if name not in VARIANTS:
        error(
            "<RRR85526302E>",
            ValueError(
                f"Unknown variant {name!r}, "
                f"expected one of {', '.join(variant_names())}"
            ),
        )
    return VARIANTS[name]
