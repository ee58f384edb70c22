"""Bundled word lists and lexicons.

All files are UTF-8, one entry per line, ``#`` starts a comment line.
"""

from functools import lru_cache
from importlib import resources
from pathlib import Path

DATA = resources.files("doctax") / "data"


def _text(path):
    if not hasattr(path, "read_text"):
        path = Path(path)
    return path.read_text(encoding="utf-8")


def read_lines(path):
    """Yield stripped, non-comment, non-blank lines of a text file."""
    for line in _text(path).splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            yield line


def read_table(path):
    """Rows of a tab-separated list file, comments skipped."""
    for line in _text(path).splitlines():
        if not line.strip() or line.startswith("#"):
            continue
        yield line.rstrip("\n").split("\t")


@lru_cache(maxsize=None)
def stopwords():
    return frozenset(w.lower() for w in read_lines(DATA / "stopwords.txt"))


@lru_cache(maxsize=None)
def abbreviations():
    return tuple(read_lines(DATA / "abbreviations.txt"))


@lru_cache(maxsize=None)
def closed_class():
    return {row[0]: row[1] for row in read_table(DATA / "closed_class.tsv")}


@lru_cache(maxsize=None)
def open_lexicon():
    return {row[0]: row[1] for row in read_table(DATA / "lexicon.tsv")}


@lru_cache(maxsize=None)
def lemma_exceptions():
    """Map surface -> list of (lemma, pos-or-None)."""
    table = {}
    for row in read_table(DATA / "lemma_exceptions.tsv"):
        pos = row[2] if len(row) > 2 and row[2] else None
        table.setdefault(row[0], []).append((row[1], pos))
    return table


@lru_cache(maxsize=None)
def task_dependencies():
    return frozenset(read_lines(DATA / "task_dependencies.txt"))


def gazetteer_path(name):
    return DATA / "gazetteers" / f"{name}.txt"
