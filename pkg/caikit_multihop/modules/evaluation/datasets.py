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
"""Benchmark loading and sampling.

Field maps per dataset kind (one JSON object per line):

    custom         id, question, answers (list or string), hop?, as_of?
    freshqa        id, question, answer_0 .. answer_9, num_hops, as_of?
    pat_questions  id, question, answers | "text answers", num_hops, as_of?
    two_wiki       _id, question, answer                   (always multi_hop)
    multihop_rag   id?, query, answer                      (always multi_hop)

Hop labels accept single_hop / multi_hop, one-hop / multi-hop and 1 / 2.
Records without a hop label are multi_hop.
"""

# Standard
from typing import Any, Callable, Dict, List, NamedTuple, Sequence
import json

# Third Party
import numpy as np

# First Party
from caikit import get_config
from caikit.core.exceptions import error_handler
import alog

# Local
from ...data_model import DatasetKind, EvalRecord, HopClass
from ...exceptions import SchemaError
from ...toolkit.temporal import parse_anchor

log = alog.use_channel("DATASETS")
error = error_handler.get(log)


class DatasetProfile(NamedTuple):
    kind: str
    # dynamic (time sensitive) or regular
    task: str
    top_k: int
    sample_size: int


def dataset_profile(kind: str) -> DatasetProfile:
    _check_kind(kind)
    settings = get_config().datasets[kind]
    return DatasetProfile(
        kind=kind,
        task=settings.task,
        top_k=int(settings.top_k),
        sample_size=int(settings.sample_size),
    )


def _check_kind(kind: str):
    kinds = [member.value for member in DatasetKind]
    error.value_check(
        "<RRR72204815E>",
        kind in kinds,
        f"Unknown dataset kind {kind!r}, expected one of {', '.join(kinds)}",
    )


_HOP_LABELS = {
    "single_hop": HopClass.SINGLE_HOP,
    "single-hop": HopClass.SINGLE_HOP,
    "one-hop": HopClass.SINGLE_HOP,
    "one_hop": HopClass.SINGLE_HOP,
    "single": HopClass.SINGLE_HOP,
    "1": HopClass.SINGLE_HOP,
    "multi_hop": HopClass.MULTI_HOP,
    "multi-hop": HopClass.MULTI_HOP,
    "multi": HopClass.MULTI_HOP,
    "2": HopClass.MULTI_HOP,
}


def _hop(value: Any) -> str:
    if value is None:
        return HopClass.MULTI_HOP.value
    label = str(value).strip().lower()
    if label.isdigit() and int(label) >= 2:
        return HopClass.MULTI_HOP.value
    if label not in _HOP_LABELS:
        raise ValueError(f"unknown hop label {value!r}")
    return _HOP_LABELS[label].value


def _answers(value: Any) -> List[str]:
    if isinstance(value, str):
        value = [value]
    if not isinstance(value, list):
        raise ValueError("answers must be a string or a list of strings")
    answers = [str(answer).strip() for answer in value if str(answer).strip()]
    if not answers:
        raise ValueError("no gold answers")
    return answers


def _anchor(value: Any) -> Any:
    if value in (None, ""):
        return None
    return parse_anchor(str(value)).isoformat()


def _custom(entry: Dict[str, Any], line_number: int) -> Dict[str, Any]:
    return {
        "record_id": str(entry["id"]),
        "question": entry["question"],
        "gold_answers": _answers(entry["answers"]),
        "hop_class": _hop(entry.get("hop")),
        "temporal_anchor": _anchor(entry.get("as_of")),
    }


def _freshqa(entry: Dict[str, Any], line_number: int) -> Dict[str, Any]:
    golds = [entry.get(f"answer_{number}") for number in range(10)]
    return {
        "record_id": str(entry["id"]),
        "question": entry["question"],
        "gold_answers": _answers([gold for gold in golds if gold]),
        "hop_class": _hop(entry["num_hops"]),
        "temporal_anchor": _anchor(entry.get("as_of")),
    }


def _pat_questions(entry: Dict[str, Any], line_number: int) -> Dict[str, Any]:
    answers = entry["answers"] if "answers" in entry else entry["text answers"]
    return {
        "record_id": str(entry["id"]),
        "question": entry["question"],
        "gold_answers": _answers(answers),
        "hop_class": _hop(entry["num_hops"]),
        "temporal_anchor": _anchor(entry.get("as_of")),
    }


def _two_wiki(entry: Dict[str, Any], line_number: int) -> Dict[str, Any]:
    return {
        "record_id": str(entry["_id"]),
        "question": entry["question"],
        "gold_answers": _answers(entry["answer"]),
        "hop_class": HopClass.MULTI_HOP.value,
        "temporal_anchor": None,
    }


def _multihop_rag(entry: Dict[str, Any], line_number: int) -> Dict[str, Any]:
    return {
        "record_id": str(entry.get("id") or f"multihop_rag-{line_number}"),
        "question": entry["query"],
        "gold_answers": _answers(entry["answer"]),
        "hop_class": HopClass.MULTI_HOP.value,
        "temporal_anchor": None,
    }


_FIELD_MAPS: Dict[str, Callable[[Dict[str, Any], int], Dict[str, Any]]] = {
    DatasetKind.CUSTOM.value: _custom,
    DatasetKind.FRESHQA.value: _freshqa,
    DatasetKind.PAT_QUESTIONS.value: _pat_questions,
    DatasetKind.TWO_WIKI.value: _two_wiki,
    DatasetKind.MULTIHOP_RAG.value: _multihop_rag,
}


def load_dataset(path: str, kind: str) -> List[EvalRecord]:
    """Read a JSONL benchmark file

    Args:
        path: str
            JSONL file, one record per line
        kind: str
            Dataset kind selecting the field map

    Returns:
        List[EvalRecord]
            Records in file order

    Raises:
        FileNotFoundError when the file does not exist
        SchemaError listing every malformed line
    """
    _check_kind(kind)
    error.file_check("<RRR72204816E>", path)
    field_map = _FIELD_MAPS[kind]
    records = []
    bad_lines = []
    details = []
    seen_ids = set()
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                entry = json.loads(line)
                if not isinstance(entry, dict):
                    raise ValueError("not a JSON object")
                fields = field_map(entry, line_number)
                question = fields["question"]
                if not isinstance(question, str) or not question.strip():
                    raise ValueError("empty question")
                if fields["record_id"] in seen_ids:
                    raise ValueError(f"duplicate id {fields['record_id']!r}")
            except (ValueError, KeyError, TypeError) as err:
                bad_lines.append(line_number)
                details.append(f"line {line_number}: {err}")
                continue
            seen_ids.add(fields["record_id"])
            records.append(EvalRecord(dataset=kind, **fields))
    if bad_lines:
        for detail in details:
            log.warning("<RRR72204817W>", f"{path}: {detail}")
        error("<RRR72204818E>", SchemaError(path, bad_lines, details))
    log.debug("Loaded %d %s records from %s", len(records), kind, path)
    return records


def sample(records: Sequence[EvalRecord], n: int, seed: int) -> List[EvalRecord]:
    """Deterministic subset of min(n, len(records)) records in file order"""
    error.type_check("<RRR72204819E>", int, n=n, seed=seed)
    error.value_check("<RRR72204820E>", n >= 1, f"n must be >= 1, got {n}")
    if n >= len(records):
        return list(records)
    rng = np.random.default_rng(seed)
    chosen = sorted(rng.choice(len(records), size=n, replace=False).tolist())
    return [records[index] for index in chosen]
