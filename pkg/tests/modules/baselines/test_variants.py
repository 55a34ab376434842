"""Tests for the variant registry"""
# Third Party
import pytest

# Local
from caikit_multihop.modules.baselines import (
    VARIANTS,
    VariantName,
    get_variant,
    variant_names,
)
from caikit_multihop.toolkit.prompt_templates import list_templates


def test_every_name_is_registered():
    assert sorted(variant_names()) == sorted(VARIANTS)
    assert len(variant_names()) == len(VariantName)


@pytest.mark.parametrize("name", variant_names())
def test_templates_exist(name):
    variant = get_variant(name)
    assert variant.name == name
    assert set(variant.template_set) <= set(list_templates())


@pytest.mark.parametrize(
    ["name", "uses_retrieval"],
    [
        ("vanilla", False),
        ("cot", False),
        ("vanilla_with_context", True),
        ("freshprompt", True),
        ("chain_of_note", True),
        ("react", True),
        ("self_ask", True),
        ("searchain", True),
        ("rrr_full", True),
        ("rrr_no_decompose", True),
        ("rrr_no_rewrite", True),
        ("rrr_no_retrieval", False),
        ("self_ask_no_retrieval", False),
        ("searchain_no_retrieval", False),
    ],
)
def test_retrieval_flags(name, uses_retrieval):
    assert get_variant(name).uses_retrieval is uses_retrieval


def test_unknown_variant():
    with pytest.raises(ValueError):
        get_variant("rrr_turbo")


def test_variant_name_must_be_a_string():
    with pytest.raises(TypeError):
        get_variant(3)
