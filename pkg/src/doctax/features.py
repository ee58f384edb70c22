"""Per-unit feature vector: phrase counts, topical breadth and intensity,
graph-entropy importance and lexical/syntactic context of the phrases.

The schema has 135 named dimensions in five blocks (see :data:`FEATURE_NAMES`):

* ``count_<cat>`` (6) phrases per category
* ``breadth``, ``intensity`` (2)
* ``imp_unit_mean`` and ``imp_<cat>`` (7)
* ``lex_<cat>_<region>_<what>`` (90) for regions before/after/between and
  what in words/noun/verb/adj/adv
* ``dep_<cat1>_<cat2>_len`` and ``..._flag`` (30) per unordered category pair
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .corpus import PosTag, content_words
from .errors import CorruptFile, EmptyUnit, SchemaMismatch
from .keyphrase import CATEGORIES, extract_all
from .stats import matrix_for
from .syntax import all_path_lengths, unit_dependencies

SCHEMA_VERSION = 1
DEP_CAP = 10
REGIONS = ("before", "after", "between")
LEX_WHAT = ("words", "noun", "verb", "adj", "adv")
CATEGORY_PAIRS = tuple(combinations(CATEGORIES, 2))


def _names():
    names = [f"count_{c.value}" for c in CATEGORIES]
    names += ["breadth", "intensity", "imp_unit_mean"]
    names += [f"imp_{c.value}" for c in CATEGORIES]
    # words before/after/between first, then PoS counts per region
    for c in CATEGORIES:
        names += [f"lex_{c.value}_{r}_words" for r in REGIONS]
        names += [f"lex_{c.value}_{r}_{w}" for w in LEX_WHAT[1:] for r in REGIONS]
    for a, b in CATEGORY_PAIRS:
        names += [f"dep_{a.value}_{b.value}_len", f"dep_{a.value}_{b.value}_flag"]
    return tuple(names)


FEATURE_NAMES = _names()
N_FEATURES = len(FEATURE_NAMES)
assert N_FEATURES == 135


# ---------------------------------------------------------------------------
# Clustering


def cluster_words(matrix, threshold=0.5):
    """Average-linkage clustering on ``d = (1 - npmi) / 2``.

    Merging continues while the closest pair of clusters has average
    distance at most ``threshold``; equal distances merge the pair whose
    sorted word tuples compare smallest. Returns sorted word tuples.
    """
    words = list(matrix.words)
    if not words:
        raise EmptyUnit("no words to cluster")
    dist = (1.0 - np.asarray(matrix.values, dtype=float)) / 2.0
    clusters = {i: [i] for i in range(len(words))}
    label = {i: (words[i],) for i in clusters}
    # pairwise summed distances between live clusters
    sums = {(i, j): dist[i, j] for i in clusters for j in clusters if i < j}
    while len(clusters) > 1:
        best = None
        for (i, j), s in sums.items():
            avg = s / (len(clusters[i]) * len(clusters[j]))
            key = (avg, min(label[i], label[j]), max(label[i], label[j]))
            if best is None or key < best[0]:
                best = (key, i, j)
        (avg, _, _), i, j = best
        if avg > threshold + 1e-12:
            break
        clusters[i] = clusters[i] + clusters.pop(j)
        label[i] = tuple(sorted(label[i] + label.pop(j)))
        new = {}
        for (x, y), s in sums.items():
            if j in (x, y):
                continue
            if i in (x, y):
                other = y if x == i else x
                s = s + sums[tuple(sorted((j, other)))]
            new[(x, y)] = s
        sums = new
    return sorted(label.values())


def breadth_intensity(clusters, n_content_words, token_counts=None):
    """``(number of clusters, share of content tokens in the largest cluster)``.

    With ``token_counts`` (lemma -> occurrences) a cluster covers the tokens
    of its lemmas; otherwise each cluster member counts once.
    """
    if not clusters or n_content_words <= 0:
        return 0, 0.0
    if token_counts is None:
        cover = [len(c) for c in clusters]
    else:
        cover = [sum(token_counts.get(w, 0) for w in c) for c in clusters]
    return len(clusters), max(cover) / n_content_words


# ---------------------------------------------------------------------------
# Word graph and entropy


@dataclass(frozen=True)
class WordGraph:
    nodes: tuple
    raw: dict  # (a, b) -> positive npmi, a < b by node order

    @property
    def weights(self):
        total = sum(self.raw.values())
        return {e: w / total for e, w in self.raw.items()} if total > 0 else {}

    @classmethod
    def from_matrix(cls, matrix):
        raw = {}
        n = len(matrix.words)
        for i in range(n):
            for j in range(i + 1, n):
                v = float(matrix.values[i, j])
                if v > 0:
                    raw[(matrix.words[i], matrix.words[j])] = v
        return cls(tuple(matrix.words), raw)

    def without(self, word):
        return WordGraph(tuple(n for n in self.nodes if n != word),
                         {e: w for e, w in self.raw.items() if word not in e})


def _entropy(values):
    total = sum(values)
    if total <= 0:
        return 0.0
    h = 0.0
    for v in values:
        p = v / total
        if p > 0:
            h -= p * math.log(p)
    return h


def graph_entropy(g):
    """Entropy of the normalized edge-weight distribution (0 without edges)."""
    return _entropy(list(g.raw.values()))


def word_importance(g, word):
    """``E(G) - E(G - word)``; 0 for words without edges or not in the graph."""
    if word not in g.nodes or not any(word in e for e in g.raw):
        return 0.0
    return graph_entropy(g) - graph_entropy(g.without(word))


def all_importances(g):
    base = graph_entropy(g)
    out = {}
    for w in g.nodes:
        if any(w in e for e in g.raw):
            out[w] = base - _entropy([v for e, v in g.raw.items() if w not in e])
        else:
            out[w] = 0.0
    return out


def phrase_importance(g, lemmas, importances=None):
    """Mean importance over a phrase's content lemmas (absent lemmas count 0)."""
    if not lemmas:
        return 0.0
    imp = importances if importances is not None else {w: word_importance(g, w) for w in set(lemmas)}
    return sum(imp.get(w, 0.0) for w in lemmas) / len(lemmas)


def phrase_lemmas(unit, phrase):
    return [unit.tokens[i].lemma for i in phrase.content_indices(unit)]


def category_importance(g, unit, phrases, importances=None):
    """Mean phrase importance per category, 0 where a category has no phrases."""
    imp = importances if importances is not None else all_importances(g)
    out = []
    for c in CATEGORIES:
        vals = [phrase_importance(g, phrase_lemmas(unit, p), imp) for p in phrases if p.category == c]
        out.append(sum(vals) / len(vals) if vals else 0.0)
    return out


# ---------------------------------------------------------------------------
# Context


_POS_GROUPS = (
    frozenset({PosTag.NOUN, PosTag.PROPER_NOUN}),
    frozenset({PosTag.VERB}),
    frozenset({PosTag.ADJ}),
    frozenset({PosTag.ADV}),
)


def _region_counts(tokens):
    words = [t for t in tokens if t.pos != PosTag.PUNCT]
    return [len(words)] + [sum(1 for t in words if t.pos in g) for g in _POS_GROUPS]


def lexical_context(unit, phrases):
    """Block D: fifteen values per category, in :data:`FEATURE_NAMES` order."""
    toks = unit.tokens
    out = []
    for c in CATEGORIES:
        mine = [p for p in phrases if p.category == c]
        if not mine:
            out += [0] * 15
            continue
        first = min(mine, key=lambda p: (p.start, p.end))
        last = max(mine, key=lambda p: (p.end, p.start))
        regions = [toks[:first.start], toks[last.end:]]
        regions.append(toks[first.end:last.start] if len(mine) > 1 and last.start > first.end else [])
        counts = [_region_counts(r) for r in regions]  # region -> [words, n, v, a, adv]
        out += [counts[r][0] for r in range(3)]
        out += [counts[r][k] for k in range(1, 5) for r in range(3)]
    return out


def syntactic_context(unit, phrases, graph):
    """Block E: (min dependency distance capped, presence flag) per category pair."""
    words = {c: set() for c in CATEGORIES}
    for p in phrases:
        words[p.category].update(i for i in p.indices if unit.tokens[i].pos != PosTag.PUNCT)
    sources = set().union(*words.values())
    dist = all_path_lengths(graph, sources)
    out = []
    for a, b in CATEGORY_PAIRS:
        best = None
        for i in words[a]:
            di = dist.get(i, {})
            for j in words[b]:
                d = 0 if i == j else di.get(j)
                if d is not None and (best is None or d < best):
                    best = d
        out += [0, 0] if best is None else [min(best, DEP_CAP), 1]
    return out


# ---------------------------------------------------------------------------
# Assembly


@dataclass(frozen=True)
class FeatureVector:
    unit_id: str
    values: tuple
    schema_version: int = SCHEMA_VERSION

    @property
    def names(self):
        return FEATURE_NAMES

    def as_array(self):
        return np.asarray(self.values, dtype=float)

    def __getitem__(self, name):
        return self.values[FEATURE_NAMES.index(name)]


@dataclass
class Analysis:
    unit: object
    phrases: list
    counts: tuple
    clusters: list
    graph: object
    vector: FeatureVector


def analyze(unit, stats, vc_model=None, gazetteers=None):
    """Run the whole per-unit pipeline, keeping intermediates."""
    words = content_words(unit)
    if not words:
        return Analysis(unit, [], (0,) * 6, [], None, FeatureVector(unit.id, (0.0,) * N_FEATURES))
    deps = unit_dependencies(unit)
    phrases, counts = extract_all(unit, stats, vc_model, gazetteers, graph=deps)
    matrix = matrix_for(stats, words)
    clusters = cluster_words(matrix)
    breadth, intensity = breadth_intensity(clusters, len(words), Counter(words))
    g = WordGraph.from_matrix(matrix)
    imp = all_importances(g)
    values = list(counts) + [breadth, intensity, sum(imp.values()) / len(imp)]
    values += category_importance(g, unit, phrases, imp)
    values += lexical_context(unit, phrases)
    values += syntactic_context(unit, phrases, deps)
    vector = FeatureVector(unit.id, tuple(float(v) for v in values))
    return Analysis(unit, phrases, counts, clusters, g, vector)


def assemble(unit, stats, vc_model=None, gazetteers=None):
    """The 135-dimension :class:`FeatureVector` of a tokenized unit."""
    return analyze(unit, stats, vc_model, gazetteers).vector


# ---------------------------------------------------------------------------
# Feature TSV


def dump_features(vectors, labels=None):
    """Header of names then one row per vector; ``labels`` adds a class column."""
    head = ["unit_id"] + (["class"] if labels is not None else []) + list(FEATURE_NAMES)
    lines = ["\t".join(head)]
    for k, fv in enumerate(vectors):
        row = [fv.unit_id] + ([labels[k] or ""] if labels is not None else [])
        row += [repr(float(v)) for v in fv.values]
        lines.append("\t".join(row))
    return "\n".join(lines) + "\n"


def load_features(text):
    """Inverse of :func:`dump_features`: ``(vectors, labels or None)``."""
    lines = [l for l in text.split("\n") if l]
    if not lines:
        raise CorruptFile("empty feature file")
    head = lines[0].split("\t")
    labelled = len(head) > 1 and head[1] == "class"
    names = head[2:] if labelled else head[1:]
    if head[0] != "unit_id" or tuple(names) != FEATURE_NAMES:
        raise SchemaMismatch("feature header does not match the schema")
    vectors, labels = [], []
    for line in lines[1:]:
        parts = line.split("\t")
        if len(parts) != len(head):
            raise CorruptFile("feature row has the wrong number of columns")
        offset = 2 if labelled else 1
        try:
            vals = tuple(float(x) for x in parts[offset:])
        except ValueError:
            raise CorruptFile("non-numeric feature value") from None
        vectors.append(FeatureVector(parts[0], vals))
        if labelled:
            labels.append(parts[1] or None)
    return vectors, (labels if labelled else None)
