"""Candidate phrases and the six key-phrase extractors.

Token positions in a :class:`KeyPhrase` are unit-level indices with a
half-open ``[start, end)`` range. ``text`` is the original surface slice of
the unit and ``lemma_text`` the space-joined lemmas of the same tokens.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from . import resources
from .corpus import PosTag
from .stats import npmi_or_min
from .syntax import unit_dependencies


class Category(str, enum.Enum):
    TASK = "Task"
    CONCEPT = "Concept"
    CODE_ELEMENT = "CodeElement"
    VERSION_CONTROL = "VersionControl"
    DIRECTIVE = "Directive"
    DOMAIN_TAG = "DomainTag"


CATEGORIES = tuple(Category)

RETAINED = frozenset({"of", "for", "and", "in", "with", "to", "on"})
DETERMINERS = frozenset({"a", "an", "the"})
CONCEPT_TAGS = frozenset({PosTag.NOUN, PosTag.PROPER_NOUN, PosTag.ADJ, PosTag.CODE})


@dataclass(frozen=True)
class KeyPhrase:
    category: Category
    unit_id: str
    start: int
    end: int
    text: str
    lemma_text: str
    sentence: int

    @property
    def indices(self):
        return range(self.start, self.end)

    def content_indices(self, unit):
        return [i for i in self.indices
                if not unit.tokens[i].is_stopword and unit.tokens[i].pos != PosTag.PUNCT]


def _phrase(category, unit, start, end, sentence):
    toks = unit.tokens
    text = unit.raw_text[toks[start].char_start:toks[end - 1].char_end]
    lemma_text = " ".join(t.lemma for t in toks[start:end])
    return KeyPhrase(category, unit.id, start, end, text, lemma_text, sentence)


def _key(tok):
    return tok.lemma if tok.pos == PosTag.CODE else tok.lemma.lower()


# ---------------------------------------------------------------------------
# Candidate phrases


def _splits(tok):
    if tok.pos == PosTag.PUNCT:
        return True
    word = tok.surface.lower()
    return tok.is_stopword and word not in RETAINED and word not in DETERMINERS


def candidate_phrases(tokens, offset=0):
    """Maximal spans between punctuation and splitting stop words.

    ``of, for, and, in, with, to, on`` and the articles stay inside spans;
    articles are trimmed from the span edges.
    """
    spans = []
    start = None
    for i, tok in enumerate(list(tokens) + [None]):
        if tok is not None and not _splits(tok):
            if start is None:
                start = i
            continue
        if start is not None:
            a, b = start, i
            while a < b and tokens[a].surface.lower() in DETERMINERS:
                a += 1
            while b > a and tokens[b - 1].surface.lower() in DETERMINERS:
                b -= 1
            if a < b:
                spans.append((a + offset, b + offset))
            start = None
    return spans


def unit_candidates(unit):
    """``(sentence index, start, end)`` for every candidate span of the unit."""
    out = []
    for si, s in enumerate(unit.sentences):
        for a, b in candidate_phrases(unit.tokens[s.start:s.end], offset=s.start):
            out.append((si, a, b))
    return out


# ---------------------------------------------------------------------------
# Concepts


def extract_concepts(unit, span, stats, sentence=0):
    """Runs of nominal/adjectival tokens chained by positive NPMI, length >= 2."""
    a, b = span
    toks = unit.tokens
    phrases = []
    run = []

    def flush():
        if len(run) >= 2:
            phrases.append(_phrase(Category.CONCEPT, unit, run[0], run[-1] + 1, sentence))

    for i in range(a, b):
        tok = toks[i]
        if tok.pos not in CONCEPT_TAGS or tok.is_stopword:
            flush()
            run = []
            continue
        if run and npmi_or_min(stats, _key(toks[run[-1]]), _key(tok)) <= 0:
            flush()
            run = []
        run.append(i)
    flush()
    return phrases


# ---------------------------------------------------------------------------
# Tasks


def _task_linked(adj, x, y, task_labels):
    """True when a path of length <= 2 with a task-related edge joins x and y."""
    for nxt, label in adj.get(x, ()):
        if nxt == y and label in task_labels:
            return True
    for mid, l1 in adj.get(x, ()):
        if mid == y:
            continue
        for nxt, l2 in adj.get(mid, ()):
            if nxt == y and (l1 in task_labels or l2 in task_labels):
                return True
    return False


def extract_tasks(unit, span, graph, stats, sentence=0, task_labels=None):
    """Verb-initial phrases inside task-linked word sequences of a span."""
    task_labels = resources.task_dependencies() if task_labels is None else task_labels
    a, b = span
    toks = unit.tokens
    adj = graph.adjacency()
    content = [i for i in range(a, b) if not toks[i].is_stopword and toks[i].pos != PosTag.PUNCT]

    runs = []
    for i in content:
        if runs and _task_linked(adj, runs[-1][-1], i, task_labels):
            runs[-1].append(i)
        else:
            runs.append([i])
    runs = [r for r in runs if len(r) >= 2]

    phrases = []
    for run in runs:
        if not any(toks[i].pos == PosTag.VERB for i in run):
            continue
        k = 0
        while k < len(run):
            if toks[run[k]].pos != PosTag.VERB:
                k += 1
                continue
            m = k
            while m + 1 < len(run) and npmi_or_min(stats, _key(toks[run[m]]), _key(toks[run[m + 1]])) > 0:
                m += 1
            if m > k:
                phrases.append(_phrase(Category.TASK, unit, run[k], run[m] + 1, sentence))
                k = m + 1
            else:
                k += 1
    return phrases


# ---------------------------------------------------------------------------
# Version control


def _match_at(keys, i, seq, alive):
    n = len(seq)
    if i + n > len(keys):
        return False
    return all(alive[i + j] and keys[i + j] == seq[j] for j in range(n))


def extract_vc(unit, span, vc_model, sentence=0):
    """Grow phrases out from seed occurrences while boundary NPMI stays positive."""
    a, b = span
    toks = unit.tokens[a:b]
    keys = [_key(t) for t in toks]
    alive = [not t.is_stopword and t.pos != PosTag.PUNCT for t in toks]
    seeds = vc_model.seeds.sequences
    stats = vc_model.stats
    found = []
    while True:
        hit = None
        for i in range(len(toks)):
            for seq in seeds:  # longest first
                if _match_at(keys, i, seq, alive):
                    hit = (i, i + len(seq))
                    break
            if hit:
                break
        if hit is None:
            break
        lo, hi = hit
        while lo > 0 and alive[lo - 1] and npmi_or_min(stats, keys[lo], keys[lo - 1]) > 0:
            lo -= 1
        while hi < len(toks) and alive[hi] and npmi_or_min(stats, keys[hi - 1], keys[hi]) > 0:
            hi += 1
        found.append((lo, hi))
        for j in range(lo, hi):
            alive[j] = False
    return [_phrase(Category.VERSION_CONTROL, unit, a + lo, a + hi, sentence) for lo, hi in sorted(found)]


# ---------------------------------------------------------------------------
# Code elements, directives, domain tags


def _in_code_span(unit, tok):
    return any(s <= tok.char_start and tok.char_end <= e for s, e in unit.code_spans)


def extract_code_elements(unit):
    """One phrase per markup code span plus runs of code-like tokens outside them."""
    toks = unit.tokens
    phrases = []
    covered = set()
    for s, e in unit.code_spans:
        idx = [i for i, t in enumerate(toks) if s <= t.char_start and t.char_end <= e]
        if idx:
            covered.update(idx)
            phrases.append(_phrase(Category.CODE_ELEMENT, unit, idx[0], idx[-1] + 1, unit.sentence_of(idx[0])))
    run = []
    for i, tok in enumerate(toks + [None]):
        if tok is not None and tok.is_code_like and i not in covered:
            if run and unit.sentence_of(run[-1]) != unit.sentence_of(i):
                phrases.append(_phrase(Category.CODE_ELEMENT, unit, run[0], run[-1] + 1, unit.sentence_of(run[0])))
                run = []
            run.append(i)
            continue
        if run:
            phrases.append(_phrase(Category.CODE_ELEMENT, unit, run[0], run[-1] + 1, unit.sentence_of(run[0])))
            run = []
    return sorted(phrases, key=lambda p: (p.start, p.end))


def _token_matches(tok, word):
    return word == tok.lemma.lower() or word == tok.surface.lower()


def _gazetteer_matches(unit, gazetteer, category, accept):
    phrases = []
    toks = unit.tokens
    seqs = gazetteer.sequences
    for si, s in enumerate(unit.sentences):
        i = s.start
        while i < s.end:
            hit = None
            for seq in seqs:  # longest first
                n = len(seq)
                if i + n <= s.end and all(_token_matches(toks[i + j], seq[j]) for j in range(n)) \
                        and accept(i, i + n):
                    hit = n
                    break
            if hit:
                phrases.append(_phrase(category, unit, i, i + hit, si))
                i += hit
            else:
                i += 1
    return phrases


def extract_directives(unit, gazetteer):
    """Gazetteer lookup; a bare one-word hit in prose must not be a stop word or verb."""
    toks = unit.tokens

    def accept(a, b):
        if any(toks[i].pos == PosTag.PUNCT for i in range(a, b)) and b - a == 1:
            return False
        if b - a > 1 or _in_code_span(unit, toks[a]):
            return True
        return not toks[a].is_stopword and toks[a].pos != PosTag.VERB

    return _gazetteer_matches(unit, gazetteer, Category.DIRECTIVE, accept)


def extract_domain_tags(unit, gazetteer):
    """Gazetteer lookup outside markup code spans."""
    toks = unit.tokens

    def accept(a, b):
        return not any(_in_code_span(unit, toks[i]) for i in range(a, b))

    return _gazetteer_matches(unit, gazetteer, Category.DOMAIN_TAG, accept)


# ---------------------------------------------------------------------------


def extract_all(unit, stats, vc_model=None, gazetteers=None, graph=None):
    """All key-phrases of a tokenized unit and the six per-category counts."""
    if not unit.tokens:
        return [], (0,) * len(CATEGORIES)
    graph = unit_dependencies(unit) if graph is None else graph
    gazetteers = gazetteers or {}
    phrases = []
    for si, a, b in unit_candidates(unit):
        phrases += extract_tasks(unit, (a, b), graph, stats, si)
        phrases += extract_concepts(unit, (a, b), stats, si)
        if vc_model is not None:
            phrases += extract_vc(unit, (a, b), vc_model, si)
    phrases += extract_code_elements(unit)
    if "directives" in gazetteers:
        phrases += extract_directives(unit, gazetteers["directives"])
    if "domain_tags" in gazetteers:
        phrases += extract_domain_tags(unit, gazetteers["domain_tags"])
    order = {c: k for k, c in enumerate(CATEGORIES)}
    phrases.sort(key=lambda p: (order[p.category], p.start, p.end))
    counts = tuple(sum(1 for p in phrases if p.category == c) for c in CATEGORIES)
    return phrases, counts


DUMP_COLUMNS = ("unit_id", "sentence_idx", "category", "start_token", "end_token", "surface")


def _escape(text):
    return text.replace("\\", "\\\\").replace("\t", "\\t").replace("\n", "\\n")


def dump_rows(phrases):
    yield "\t".join(DUMP_COLUMNS)
    for p in phrases:
        yield "\t".join((p.unit_id, str(p.sentence), p.category.value, str(p.start), str(p.end), _escape(p.text)))
