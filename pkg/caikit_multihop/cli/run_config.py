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
"""Run configuration: one YAML (or JSON) file merged over the library
defaults, then overridden by command line flags.

File layout, every key optional:

    model:
      model_name: gpt-3.5-turbo
      temperature: 0.3
      endpoint_url: https://api.openai.com/v1
      api_key_ref: OPENAI_API_KEY
    retriever:
      top_k: 3
      min_score: 0.0
    step_budget: 8
    variant: rrr_full
    dataset_path: data/freshqa.jsonl
    dataset_kind: freshqa
    sample_size: 600
    seed: 7
    index_path: runs/index
    web_fixtures_dir: null
    cache_dir: runs/cache
    output_dir: runs
    concurrency: 4
    snippet_max_chars: 4000
    scripted_path: null
    judge: false

Unset top_k and sample_size fall back to the dataset profile.
"""

# Standard
from typing import Any, Dict, Optional

# First Party
from caikit import get_config
from caikit.core.exceptions import error_handler
import aconfig
import alog

# Local
from ..data_model import ModelConfig, RetrieverConfig, RunConfig
from ..modules.baselines import get_variant
from ..modules.evaluation import dataset_profile
from ..modules.retrieval import validate_retriever_config
from ..resources.chat_backend import default_model_config, validate_model_config

log = alog.use_channel("CLI")
error = error_handler.get(log)

_MODEL_FIELDS = set(ModelConfig.__annotations__)
_RETRIEVER_FIELDS = set(RetrieverConfig.__annotations__)
_RUN_FIELDS = set(RunConfig.__annotations__) - {"model", "retriever"}


def _plain(value: Any) -> Any:
    if isinstance(value, dict):
        return {key: _plain(val) for key, val in value.items()}
    return value


def read_config_file(path: str) -> Dict[str, Any]:
    """Read a run configuration file and reject unknown keys"""
    error.file_check("<RRR55021301E>", path)
    raw = _plain(aconfig.Config.from_yaml(path, override_env_vars=False))
    unknown = set(raw) - _RUN_FIELDS - {"model", "retriever"}
    error.value_check(
        "<RRR55021302E>",
        not unknown,
        f"Unknown keys in {path}: {', '.join(sorted(unknown))}",
    )
    sections = (("model", _MODEL_FIELDS), ("retriever", _RETRIEVER_FIELDS))
    for section, allowed in sections:
        values = raw.get(section) or {}
        error.type_check("<RRR55021303E>", dict, **{section: values})
        unknown = set(values) - allowed
        error.value_check(
            "<RRR55021304E>",
            not unknown,
            f"Unknown {section} keys in {path}: {', '.join(sorted(unknown))}",
        )
    return raw


def load_run_config(
    path: Optional[str] = None, overrides: Optional[Dict[str, Any]] = None
) -> RunConfig:
    """Build the RunConfig for one command

    Args:
        path: Optional[str]
            Run configuration file
        overrides: Optional[Dict[str, Any]]
            Flag values; None entries are ignored. `top_k` goes to the
            retriever section, `model_name` and `temperature` to the model.

    Returns:
        RunConfig
            Validated configuration
    """
    raw = read_config_file(path) if path else {}
    overrides = {key: val for key, val in (overrides or {}).items() if val is not None}
    lib_cfg = get_config()

    model_values = dict(raw.get("model") or {})
    retriever_values = dict(raw.get("retriever") or {})
    run_values = {key: val for key, val in raw.items() if key in _RUN_FIELDS}
    for key, val in overrides.items():
        if key == "top_k":
            retriever_values["top_k"] = val
        elif key in ("model_name", "temperature"):
            model_values[key] = val
        else:
            error.value_check(
                "<RRR55021305E>", key in _RUN_FIELDS, f"Unknown override {key!r}"
            )
            run_values[key] = val

    kind = run_values.get("dataset_kind", "custom")
    profile = dataset_profile(kind)
    retriever_values.setdefault("top_k", profile.top_k)
    retriever_values.setdefault("min_score", float(lib_cfg.retrieval.min_score))
    run_values.setdefault("sample_size", profile.sample_size)
    run_values.setdefault("step_budget", int(lib_cfg.pipeline.step_budget))
    run_values.setdefault("seed", int(lib_cfg.evaluation.seed))
    run_values.setdefault("concurrency", int(lib_cfg.evaluation.concurrency))
    run_values.setdefault(
        "snippet_max_chars", int(lib_cfg.retrieval.snippet_max_chars)
    )

    config = RunConfig(
        model=default_model_config(**model_values),
        retriever=RetrieverConfig(
            top_k=int(retriever_values["top_k"]),
            min_score=float(retriever_values["min_score"]),
        ),
        **run_values,
    )
    validate_run_config(config)
    return config


def validate_run_config(config: RunConfig):
    validate_model_config(config.model)
    validate_retriever_config(config.retriever)
    get_variant(config.variant)
    error.type_check(
        "<RRR55021306E>",
        int,
        step_budget=config.step_budget,
        concurrency=config.concurrency,
        seed=config.seed,
        sample_size=config.sample_size,
    )
    error.value_check(
        "<RRR55021307E>",
        config.step_budget >= 1,
        f"step_budget must be >= 1, got {config.step_budget}",
    )
    error.value_check(
        "<RRR55021308E>",
        config.concurrency >= 1,
        f"concurrency must be >= 1, got {config.concurrency}",
    )
    error.value_check(
        "<RRR55021309E>",
        config.sample_size >= 1,
        f"sample_size must be >= 1, got {config.sample_size}",
    )
