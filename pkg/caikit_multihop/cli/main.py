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
"""Command line entry point

    caikit-multihop index CORPUS OUTPUT
    caikit-multihop ask "QUESTION" [--as-of 2024-05-01] [run flags]
    caikit-multihop eval [run flags]
    caikit-multihop ablate [--variants a,b,...] [run flags]
    caikit-multihop trace TRACE_FILE

Logging is configured from LOG_LEVEL, LOG_FILTERS, LOG_FORMATTER and
LOG_THREAD_ID.
"""

# Standard
from typing import Any, Dict, List, Optional
import argparse
import os
import sys

# First Party
import alog

# Local
from ..exceptions import MultihopError
from ..modules.baselines import variant_names
from . import commands
from .run_config import load_run_config

log = alog.use_channel("CLI")

DEFAULT_ABLATION = "rrr_full,rrr_no_rewrite,rrr_no_decompose,rrr_no_retrieval"

# Flag destinations copied into the run configuration
_OVERRIDES = (
    "variant",
    "seed",
    "sample_size",
    "top_k",
    "step_budget",
    "concurrency",
    "cache_dir",
    "scripted_path",
    "output_dir",
    "dataset_path",
    "dataset_kind",
    "index_path",
    "web_fixtures_dir",
    "model_name",
    "temperature",
)


def configure_logging():
    alog.configure(
        default_level=os.environ.get("LOG_LEVEL", "warning"),
        filters=os.environ.get("LOG_FILTERS", "httpx:off,httpcore:off"),
        formatter=os.environ.get("LOG_FORMATTER", "pretty"),
        thread_id=os.environ.get("LOG_THREAD_ID", "") == "true",
    )


def _add_run_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--config", help="Run configuration file (YAML or JSON)")
    parser.add_argument("--variant", choices=variant_names())
    parser.add_argument("--seed", type=int)
    parser.add_argument("--sample-size", dest="sample_size", type=int)
    parser.add_argument("--top-k", dest="top_k", type=int)
    parser.add_argument("--step-budget", dest="step_budget", type=int)
    parser.add_argument("--concurrency", type=int)
    parser.add_argument("--cache-dir", dest="cache_dir")
    parser.add_argument(
        "--scripted",
        dest="scripted_path",
        metavar="TRANSCRIPT",
        help="Replay model responses from this file instead of calling the endpoint",
    )
    parser.add_argument("--output-dir", dest="output_dir")
    parser.add_argument("--dataset", dest="dataset_path")
    parser.add_argument("--dataset-kind", dest="dataset_kind")
    parser.add_argument("--index", dest="index_path", help="Directory written by index")
    parser.add_argument(
        "--web-fixtures", dest="web_fixtures_dir", help="Recorded web search results"
    )
    parser.add_argument("--model", dest="model_name")
    parser.add_argument("--temperature", type=float)
    parser.add_argument(
        "--judge",
        action="store_const",
        const=True,
        default=None,
        help="Grade answers with the model instead of the match rule",
    )
    parser.add_argument(
        "--no-progress", dest="progress", action="store_false", default=True
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caikit-multihop",
        description="Review then refine multi-hop question answering",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    index = sub.add_parser("index", help="Build a BM25 index from a JSONL corpus")
    index.add_argument("corpus", help="JSONL file with id, title and text fields")
    index.add_argument("output", help="Index directory to write")

    ask = sub.add_parser("ask", help="Answer one question")
    ask.add_argument("question")
    ask.add_argument("--as-of", dest="as_of", help="Temporal anchor, YYYY-MM-DD")
    _add_run_flags(ask)

    evaluate = sub.add_parser("eval", help="Score one variant on a dataset sample")
    _add_run_flags(evaluate)

    ablate = sub.add_parser("ablate", help="Compare variants on the same sample")
    ablate.add_argument(
        "--variants",
        default=DEFAULT_ABLATION,
        help=f"Comma separated variant names (default {DEFAULT_ABLATION})",
    )
    _add_run_flags(ablate)

    trace = sub.add_parser("trace", help="Render a written trace")
    trace.add_argument("trace_path")
    return parser


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    overrides = {name: getattr(args, name, None) for name in _OVERRIDES}
    overrides["judge"] = getattr(args, "judge", None)
    return overrides


def _dispatch(args: argparse.Namespace) -> int:
    if args.command == "index":
        return commands.cmd_index(args.corpus, args.output)
    if args.command == "trace":
        return commands.cmd_trace(args.trace_path)

    config = load_run_config(args.config, _overrides(args))
    if args.command == "ask":
        return commands.cmd_ask(args.question, config, as_of=args.as_of)
    if args.command == "eval":
        return commands.cmd_eval(config, progress=args.progress)
    variants = [name.strip() for name in args.variants.split(",") if name.strip()]
    return commands.cmd_ablate(config, variants, progress=args.progress)


def main(argv: Optional[List[str]] = None) -> int:
    configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return _dispatch(args)
    except (MultihopError, ValueError, TypeError, OSError) as err:
        log.debug("Command %s failed: %r", args.command, err)
        print(
            f"caikit-multihop {args.command}: {type(err).__name__}: {err}",
            file=sys.stderr,
        )
        return 1
