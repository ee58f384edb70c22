"""Labeled unit collections stored as three-column TSV.

The text column escapes backslash, tab, newline and carriage return as
``\\\\``, ``\\t``, ``\\n`` and ``\\r``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from ._io import write_atomic
from .errors import CorruptFile, SchemaMismatch
from .model import KnowledgeClass

HEADER = "unit_id\tclass\ttext"
_ESC = {"\\": "\\\\", "\t": "\\t", "\n": "\\n", "\r": "\\r"}
_UNESC = {"\\\\": "\\", "\\t": "\t", "\\n": "\n", "\\r": "\r"}


def escape(text):
    return "".join(_ESC.get(ch, ch) for ch in text)


def unescape(text):
    def sub(m):
        try:
            return _UNESC[m.group()]
        except KeyError:
            raise CorruptFile(f"bad escape {m.group()!r}") from None
    return re.sub(r"\\.|\\$", sub, text)


@dataclass(frozen=True)
class Row:
    unit_id: str
    klass: KnowledgeClass
    text: str


class LabeledDataset(list):
    """A list of :class:`Row` with unique ids."""

    @property
    def labels(self):
        return [r.klass for r in self]


def dumps_dataset(rows):
    lines = [HEADER]
    for r in rows:
        lines.append(f"{r.unit_id}\t{KnowledgeClass(r.klass).value}\t{escape(r.text)}")
    return "\n".join(lines) + "\n"


def loads_dataset(text):
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0].rstrip("\r") != HEADER:
        raise CorruptFile("dataset must start with the header 'unit_id<TAB>class<TAB>text'")
    rows = LabeledDataset()
    seen = set()
    for n, line in enumerate(lines[1:], start=2):
        parts = line.split("\t")
        if len(parts) != 3:
            raise CorruptFile(f"line {n}: expected 3 columns, found {len(parts)}")
        uid, name, body = parts
        if uid in seen:
            raise CorruptFile(f"line {n}: duplicate unit id {uid!r}")
        seen.add(uid)
        try:
            klass = KnowledgeClass(name)
        except ValueError:
            raise SchemaMismatch(f"line {n}: unknown class {name!r}") from None
        rows.append(Row(uid, klass, unescape(body)))
    return rows


def load_dataset(path):
    try:
        return loads_dataset(Path(path).read_text(encoding="utf-8"))
    except UnicodeDecodeError:
        raise CorruptFile(f"{path}: not UTF-8 text") from None


def save_dataset(rows, path):
    write_atomic(path, dumps_dataset(rows))
