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
"""SQuAD style answer normalization, match rule and token F1"""

# Standard
from collections import Counter
from typing import Iterable, List
import re
import string

# First Party
from caikit.core.exceptions import error_handler
import alog

log = alog.use_channel("METRICS")
error = error_handler.get(log)

_PUNCTUATION = set(string.punctuation)
_ARTICLES = re.compile(r"\b(a|an|the)\b")


def normalize_answer(text: str) -> str:
    """Lowercase, strip punctuation, drop articles, collapse whitespace"""
    text = text.lower()
    text = "".join(char for char in text if char not in _PUNCTUATION)
    text = _ARTICLES.sub(" ", text)
    return " ".join(text.split())


def answer_tokens(text: str) -> List[str]:
    return normalize_answer(text).split()


def _contains_run(haystack: List[str], needle: List[str]) -> bool:
    width = len(needle)
    return any(
        haystack[start : start + width] == needle
        for start in range(len(haystack) - width + 1)
    )


def is_correct(prediction: str, gold_answers: Iterable[str]) -> bool:
    """A normalized gold answer equals the normalized prediction or appears in
    it as a contiguous run of whole tokens
    """
    gold_answers = list(gold_answers)
    error.value_check(
        "<RRR37710452E>", len(gold_answers) > 0, "gold_answers must not be empty"
    )
    predicted = answer_tokens(prediction)
    for gold in gold_answers:
        expected = answer_tokens(gold)
        if expected == predicted:
            return True
        if expected and _contains_run(predicted, expected):
            return True
    return False


def _single_f1(prediction: str, gold: str) -> float:
    predicted = answer_tokens(prediction)
    expected = answer_tokens(gold)
    if not predicted or not expected:
        return 0.0
    overlap = sum((Counter(predicted) & Counter(expected)).values())
    # Harmonic mean of overlap/|predicted| and overlap/|expected|
    return 2 * overlap / (len(predicted) + len(expected))


def token_f1(prediction: str, gold) -> float:
    """F1 over normalized token multisets, the best one when `gold` is a list
    of answers. 0 when either side has no tokens.
    """
    if isinstance(gold, str):
        return _single_f1(prediction, gold)
    return max((_single_f1(prediction, answer) for answer in gold), default=0.0)
