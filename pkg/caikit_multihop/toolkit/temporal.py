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
"""Helpers for the temporal anchor ("as of <Month Year>") of a question"""

# Standard
from datetime import date
from typing import Optional, Union

# First Party
from caikit.core.exceptions import error_handler
import alog

log = alog.use_channel("TEMPORAL")
error = error_handler.get(log)


def parse_anchor(value: Optional[Union[str, date]]) -> Optional[date]:
    """Parse an ISO calendar date. Month precision (YYYY-MM) is accepted and
    anchored to the first of the month.

    Raises:
        ValueError if the value is not a valid calendar date
    """
    if value is None or isinstance(value, date):
        return value
    error.type_check("<RRR11304562E>", str, value=value)
    text = value.strip()
    if len(text) == 7:
        text = f"{text}-01"
    try:
        return date.fromisoformat(text)
    except ValueError:
        error("<RRR11304563E>", ValueError(f"Invalid temporal anchor: {value!r}"))


def month_year(anchor: Union[str, date]) -> str:
    """Render the anchor the way it appears in rewritten queries, e.g. June 2024"""
    anchor = parse_anchor(anchor)
    return f"{anchor.strftime('%B')} {anchor.year}"


def render_anchor(anchor: Optional[Union[str, date]]) -> str:
    """Render the "as of" clause, empty when the question has no anchor"""
    if not anchor:
        return ""
    return f"as of {month_year(anchor)}"


def contains_anchor(text: str, anchor: Optional[Union[str, date]]) -> bool:
    """Check whether a rewritten query mentions the anchor's month and year"""
    if not anchor:
        return True
    return month_year(anchor).lower() in text.lower()


def anchor_query(query: str, anchor: Optional[Union[str, date]]) -> str:
    """Append the "as of" clause to a query that does not mention the anchor"""
    if contains_anchor(query, anchor):
        return query
    stripped = query.rstrip().rstrip("?").rstrip()
    suffix = "?" if query.rstrip().endswith("?") else ""
    return f"{stripped} {render_anchor(anchor)}{suffix}"
