"""Windowed co-occurrence statistics and normalized PMI.

Pairs are counted as a one-to-one matching between occurrences: two content
tokens with distinct lemmas ``a`` and ``b`` are paired when they are fewer
than ``window_k`` positions apart, and every occurrence takes part in at
most one pair per partner lemma. Scanning left to right and pairing each
token with the earliest still-unpaired partner occurrence in its window
yields a maximum matching, so ``pair_count[a, b] <= min(count[a], count[b])``
always holds. A stream of ``L`` tokens contributes ``max(1, L - K + 1)``
window positions.

Probabilities: ``p(t) = count[t] / total_terms`` and
``p(a, b) = pair_count[a, b] / total_positions``; logarithms are natural.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ._io import write_atomic
from .corpus import content_words
from .errors import CorruptFile, EmptyInput, EmptyUnit, UnknownTerm, VersionMismatch, WindowTooSmall

MAGIC = "DTXSTATS"
VERSION = 1
DEFAULT_WINDOW = 5
PROB_ESTIMATE = "p(t)=term_count/total_terms;p(a,b)=pair_count/total_positions"


def pair_key(a, b):
    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True)
class CorpusStats:
    window_k: int
    total_positions: int
    term_count: dict = field(default_factory=dict)
    pair_count: dict = field(default_factory=dict)
    total_terms: int = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "total_terms", sum(self.term_count.values()))

    @property
    def vocab_size(self):
        return len(self.term_count)

    def pair(self, a, b):
        return self.pair_count.get(pair_key(a, b), 0)

    def __contains__(self, term):
        return self.term_count.get(term, 0) > 0


def count_stream(lemmas, window_k):
    """Term counts, pair counts and window positions for one lemma stream."""
    terms = Counter(lemmas)
    pairs = Counter()
    taken = set()  # (position, partner lemma) already used in a pair
    for j, b in enumerate(lemmas):
        seen = set()
        for i in range(max(0, j - window_k + 1), j):
            a = lemmas[i]
            if a == b or a in seen:
                continue
            if (i, b) in taken:
                continue
            seen.add(a)
            if (j, a) in taken:
                continue
            taken.add((i, b))
            taken.add((j, a))
            pairs[pair_key(a, b)] += 1
    windows = max(1, len(lemmas) - window_k + 1) if lemmas else 0
    return terms, pairs, windows


def _check_window(window_k):
    if window_k <= 2:
        raise WindowTooSmall(f"window size must exceed 2, got {window_k}")


def build_stats_from_streams(streams, window_k=DEFAULT_WINDOW):
    """Aggregate :func:`count_stream` over lemma streams (one per unit)."""
    _check_window(window_k)
    terms, pairs, positions = Counter(), Counter(), 0
    any_stream = False
    for lemmas in streams:
        any_stream = True
        t, p, w = count_stream(list(lemmas), window_k)
        terms.update(t)
        pairs.update(p)
        positions += w
    if not any_stream:
        raise EmptyInput("corpus has no units")
    return CorpusStats(window_k, positions, dict(sorted(terms.items())), dict(sorted(pairs.items())))


def build_stats(units, window_k=DEFAULT_WINDOW):
    """Statistics over the content-lemma streams of tokenized units."""
    return build_stats_from_streams((content_words(u) for u in units), window_k)


def npmi(stats, t1, t2):
    """Normalized PMI in [-1, 1]; raises :class:`UnknownTerm` for unseen terms."""
    for t in (t1, t2):
        if stats.term_count.get(t, 0) <= 0:
            raise UnknownTerm(t)
    if t1 == t2:
        return 1.0
    joint = stats.pair(t1, t2)
    if joint == 0:
        return -1.0
    total = stats.total_terms
    p_ab = joint / stats.total_positions
    if p_ab >= 1.0:
        return 1.0
    log_a = math.log(stats.term_count[t1] / total)
    log_b = math.log(stats.term_count[t2] / total)
    value = (log_a + log_b) / math.log(p_ab) - 1.0
    return min(1.0, max(-1.0, value))


def npmi_or_min(stats, t1, t2):
    """:func:`npmi` with unseen terms scored -1."""
    try:
        return npmi(stats, t1, t2)
    except UnknownTerm:
        return -1.0


@dataclass(frozen=True)
class NpmiMatrix:
    words: tuple
    values: np.ndarray

    def index(self, word):
        return self.words.index(word)

    def get(self, a, b):
        return float(self.values[self.words.index(a), self.words.index(b)])


def matrix_for(stats, words):
    words = tuple(dict.fromkeys(words))
    n = len(words)
    values = np.eye(n)
    for i in range(n):
        for j in range(i + 1, n):
            values[i, j] = values[j, i] = npmi_or_min(stats, words[i], words[j])
    return NpmiMatrix(words, values)


def unit_matrix(stats, unit):
    """NPMI matrix over the unique content lemmas of ``unit``."""
    words = content_words(unit)
    if not words:
        raise EmptyUnit(f"unit {unit.id!r} has no content words")
    return matrix_for(stats, words)


# ---------------------------------------------------------------------------
# Persistence


def dumps_stats(stats):
    lines = [
        f"{MAGIC}\t{VERSION}",
        f"window_k\t{stats.window_k}",
        f"total_positions\t{stats.total_positions}",
        f"total_terms\t{stats.total_terms}",
        f"prob_estimate\t{PROB_ESTIMATE}",
        "log_base\te",
        f"[terms]\t{len(stats.term_count)}",
    ]
    lines += [f"{t}\t{c}" for t, c in sorted(stats.term_count.items())]
    lines.append(f"[pairs]\t{len(stats.pair_count)}")
    lines += [f"{a}\t{b}\t{c}" for (a, b), c in sorted(stats.pair_count.items())]
    lines.append("[end]")
    return "\n".join(lines) + "\n"


def save_stats(stats, path):
    write_atomic(path, dumps_stats(stats))


def _header(lines, pos, key):
    parts = lines[pos].split("\t")
    if len(parts) != 2 or parts[0] != key:
        raise CorruptFile(f"expected {key!r} on line {pos + 1}")
    return parts[1]


def _int(value, what):
    try:
        n = int(value)
    except ValueError:
        raise CorruptFile(f"bad integer for {what}: {value!r}") from None
    if n < 0:
        raise CorruptFile(f"negative {what}")
    return n


def parse_stats(lines, start=0):
    """Parse a stats block from ``lines`` beginning at ``start``.

    Returns ``(stats, next_line_index)``.
    """
    try:
        magic = lines[start].split("\t")
        if magic[0] != MAGIC or len(magic) != 2:
            raise CorruptFile("not a stats file (bad magic)")
        version = _int(magic[1], "version")
        if version != VERSION:
            raise VersionMismatch(f"stats format version {version}, expected {VERSION}")
        window_k = _int(_header(lines, start + 1, "window_k"), "window_k")
        positions = _int(_header(lines, start + 2, "total_positions"), "total_positions")
        total_terms = _int(_header(lines, start + 3, "total_terms"), "total_terms")
        _header(lines, start + 4, "prob_estimate")
        _header(lines, start + 5, "log_base")
        pos = start + 6
        n_terms = _int(_header(lines, pos, "[terms]"), "term table size")
        terms = {}
        for line in lines[pos + 1:pos + 1 + n_terms]:
            parts = line.split("\t")
            if len(parts) != 2:
                raise CorruptFile(f"bad term row {line!r}")
            terms[parts[0]] = _int(parts[1], "term count")
        pos += 1 + n_terms
        n_pairs = _int(_header(lines, pos, "[pairs]"), "pair table size")
        pairs = {}
        for line in lines[pos + 1:pos + 1 + n_pairs]:
            parts = line.split("\t")
            if len(parts) != 3:
                raise CorruptFile(f"bad pair row {line!r}")
            pairs[pair_key(parts[0], parts[1])] = _int(parts[2], "pair count")
        pos += 1 + n_pairs
        if lines[pos] != "[end]":
            raise CorruptFile("missing end marker")
    except IndexError:
        raise CorruptFile("stats file is truncated") from None
    if len(terms) != n_terms or len(pairs) != n_pairs:
        raise CorruptFile("duplicate rows in stats tables")
    if sum(terms.values()) != total_terms:
        raise CorruptFile("term counts do not add up to total_terms")
    _check_window(window_k)
    return CorpusStats(window_k, positions, dict(sorted(terms.items())), dict(sorted(pairs.items()))), pos + 1


def loads_stats(text):
    return parse_stats(text.split("\n"))[0]


def load_stats(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError:
        raise CorruptFile(f"{path}: not UTF-8 text") from None
    return loads_stats(text)
