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
"""Prompt templates stored as text files with named placeholders.

Placeholders look like {question} or {q}. Anything else in braces (JSON
examples, the empty "{}") is left untouched, so templates never need escaping.
"""

# Standard
from functools import lru_cache
from pathlib import Path
from typing import Dict, List, NamedTuple, Optional
import os
import re

# First Party
from caikit.core.exceptions import error_handler
import alog

# Local
from .trace_utils import digest

log = alog.use_channel("PROMPTS")
error = error_handler.get(log)

PROMPTS_DIR = Path(__file__).parent.parent / "prompts"

# Bumped whenever the placeholder scheme or the file set changes
TEMPLATE_SET_VERSION = "1"

_PLACEHOLDER = re.compile(r"\{([a-z_]+)\}")


class PromptTemplate(NamedTuple):
    name: str
    text: str

    @property
    def placeholders(self) -> List[str]:
        return sorted(set(_PLACEHOLDER.findall(self.text)))

    @property
    def checksum(self) -> str:
        return digest(self.text)

    def render(self, **values: str) -> str:
        """Fill every placeholder of the template

        Raises:
            ValueError if a placeholder of the template has no value
        """
        missing = [name for name in self.placeholders if name not in values]
        error.value_check(
            "<RRR55019238E>",
            not missing,
            f"Template {self.name} is missing values for {missing}",
        )
        return _PLACEHOLDER.sub(
            lambda match: str(values.get(match.group(1), match.group(0))),
            self.text,
        )


# Keyed on modification time and size so edited files are read again
@lru_cache(maxsize=None)
def _read_template(path: str, mtime_ns: int, size: int) -> str:
    del mtime_ns, size
    with open(path, "r", encoding="utf-8") as handle:
        return handle.read()


def load_template(name: str, prompts_dir: Optional[str] = None) -> PromptTemplate:
    """Load `<name>.txt` from the prompts directory"""
    directory = Path(prompts_dir) if prompts_dir else PROMPTS_DIR
    path = directory / f"{name}.txt"
    error.file_check("<RRR55019239E>", str(path))
    stat = os.stat(path)
    text = _read_template(str(path), stat.st_mtime_ns, stat.st_size)
    return PromptTemplate(name=name, text=text)


def list_templates(prompts_dir: Optional[str] = None) -> List[str]:
    directory = Path(prompts_dir) if prompts_dir else PROMPTS_DIR
    return sorted(path.stem for path in directory.glob("*.txt"))


def template_checksums(prompts_dir: Optional[str] = None) -> Dict[str, str]:
    return {
        name: load_template(name, prompts_dir).checksum
        for name in list_templates(prompts_dir)
    }


def prompt_set_digest(prompts_dir: Optional[str] = None) -> str:
    """Hash over the versioned template file set"""
    return digest(
        {
            "version": TEMPLATE_SET_VERSION,
            "templates": template_checksums(prompts_dir),
        }
    )
