"""Deterministic shallow syntax.

A rule-based part-of-speech tagger, a chunk-attachment approximation of a
dependency parse and dependency path lengths. Everything here is a pure
function of its inputs; :class:`SyntaxProvider` is the seam for swapping in
a statistical parser.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from . import resources
from .corpus import PosTag

LABELS = ("subj", "dobj", "prep", "pobj", "amod", "nn", "advmod", "conj", "xcomp", "root-attach")

_SUFFIX_RULES = (
    (("tion", "sion", "ment", "ness", "ity", "ance", "ence", "ship", "ism"), PosTag.NOUN),
    (("ize", "ise", "ify"), PosTag.VERB),
    (("ous", "ful", "able", "ible", "ive", "less", "ical", "ic", "al"), PosTag.ADJ),
    (("ly",), PosTag.ADV),
)

NOMINAL = frozenset({PosTag.NOUN, PosTag.PROPER_NOUN, PosTag.CODE})
NP_PARTS = NOMINAL | {PosTag.ADJ}


def _tag_word(tok, initial):
    closed = resources.closed_class()
    lexicon = resources.open_lexicon()
    surface = tok.surface
    lower = surface.lower()
    if lower in closed:
        return PosTag(closed[lower])
    capitalized = surface[:1].isupper()
    key = lower if initial or not capitalized else surface
    if key in lexicon:
        return PosTag(lexicon[key])
    if capitalized and not initial:
        return PosTag.PROPER_NOUN
    for suffixes, tag in _SUFFIX_RULES:
        if lower.endswith(suffixes) and len(lower) > max(len(s) for s in suffixes if lower.endswith(s)) + 1:
            return tag
    if capitalized and initial and len(surface) > 1 and surface[1:].lower() != surface[1:]:
        return PosTag.PROPER_NOUN
    return PosTag.NOUN


def pos_tag(tokens):
    """Coarse tags for one sentence worth of tokens.

    Closed-class words, then the open lexicon, then suffix rules; two
    context repairs follow: a verb right after a determiner becomes nominal,
    and a base-form word right after "to" becomes a verb.
    """
    tags = []
    first_word = True
    for tok in tokens:
        if tok.is_code_like or tok.pos == PosTag.CODE:
            tags.append(PosTag.CODE)
        elif tok.pos in (PosTag.PUNCT, PosTag.NUM):
            tags.append(tok.pos)
        else:
            tags.append(_tag_word(tok, first_word))
        if tags[-1] != PosTag.PUNCT:
            first_word = False

    closed = resources.closed_class()
    for i in range(1, len(tokens)):
        prev, tag = tags[i - 1], tags[i]
        lower = tokens[i].surface.lower()
        if lower in closed:
            continue
        if prev == PosTag.DET and tag == PosTag.VERB:
            tags[i] = PosTag.ADJ if lower.endswith(("ed", "en")) else PosTag.NOUN
        elif (tokens[i - 1].surface.lower() == "to" and tag in (PosTag.NOUN, PosTag.ADJ)
              and not lower.endswith(("s", "ed", "ing"))):
            tags[i] = PosTag.VERB
    return tags


# ---------------------------------------------------------------------------
# Dependencies


@dataclass
class DependencyGraph:
    """Labelled head -> dependent edges over unit-level token indices."""

    edges: list = field(default_factory=list)  # (head, dependent, label)
    sentence_of: dict = field(default_factory=dict)

    def heads(self):
        return {dep: head for head, dep, _ in self.edges}

    def adjacency(self):
        adj = {}
        for head, dep, label in self.edges:
            adj.setdefault(head, []).append((dep, label))
            adj.setdefault(dep, []).append((head, label))
        return adj

    def merge(self, other):
        self.edges.extend(other.edges)
        self.sentence_of.update(other.sentence_of)
        self._adj = None
        return self


@dataclass
class _Chunk:
    kind: str  # NP, VP, PREP, ADV, CONJ, TO, OTHER
    tokens: list
    head: int
    attached: bool = False


def _chunk(tags, offset):
    chunks = []
    i, n = 0, len(tags)
    while i < n:
        tag = tags[i]
        if tag == PosTag.PRON:
            chunks.append(_Chunk("NP", [i], i))
            i += 1
        elif tag == PosTag.DET or tag in NP_PARTS:
            j = i + 1 if tag == PosTag.DET else i
            k = j
            while k < n and tags[k] in NP_PARTS:
                k += 1
            if k == j:
                chunks.append(_Chunk("OTHER", [i], i))
                i += 1
                continue
            nominal = [x for x in range(j, k) if tags[x] in NOMINAL]
            head = nominal[-1] if nominal else k - 1
            chunks.append(_Chunk("NP", list(range(i, k)), head))
            i = k
        elif tag == PosTag.VERB:
            k = i
            while k < n and tags[k] == PosTag.VERB:
                k += 1
            chunks.append(_Chunk("VP", list(range(i, k)), k - 1))
            i = k
        elif tag == PosTag.PREP:
            chunks.append(_Chunk("PREP", [i], i))
            i += 1
        elif tag == PosTag.ADV:
            chunks.append(_Chunk("ADV", [i], i))
            i += 1
        elif tag == PosTag.CONJ:
            chunks.append(_Chunk("CONJ", [i], i))
            i += 1
        else:
            chunks.append(_Chunk("OTHER", [i], i))
            i += 1
    for c in chunks:
        c.tokens = [t + offset for t in c.tokens]
        c.head += offset
    return chunks


def build_dependencies(tokens, tags=None, offset=0):
    """Approximate dependency graph for one tagged sentence.

    ``offset`` is the unit-level index of the sentence's first token.
    """
    tags = [t.pos for t in tokens] if tags is None else list(tags)
    surfaces = [t.surface.lower() for t in tokens]
    graph = DependencyGraph()
    for i in range(len(tokens)):
        graph.sentence_of[i + offset] = offset
    chunks = _chunk(tags, offset)
    edges = graph.edges
    has_head = set()

    def attach(head, dep, label):
        if dep in has_head or head == dep:
            return
        edges.append((head, dep, label))
        has_head.add(dep)

    for c in chunks:
        if c.kind == "NP":
            for t in c.tokens:
                if t == c.head or tags[t - offset] == PosTag.DET:
                    continue
                attach(c.head, t, "amod" if tags[t - offset] == PosTag.ADJ else "nn")

    verbs = [i for i, c in enumerate(chunks) if c.kind == "VP"]
    if not verbs:
        return graph

    for i, c in enumerate(chunks):
        if c.kind == "VP":
            for t in c.tokens[:-1]:
                attach(c.head, t, "root-attach")

    def neighbour(i, step):
        j = i + step
        while 0 <= j < len(chunks) and chunks[j].kind == "ADV":
            j += step
        return j if 0 <= j < len(chunks) else None

    # xcomp: VP "to" VP
    for i, c in enumerate(chunks):
        if c.kind != "VP" or i < 2:
            continue
        marker = chunks[i - 1]
        if marker.kind == "PREP" and surfaces[marker.head - offset] == "to" and chunks[i - 2].kind == "VP":
            attach(chunks[i - 2].head, c.head, "xcomp")
            marker.kind = "TO"

    # coordination
    for i, c in enumerate(chunks):
        if c.kind != "CONJ" or i == 0 or i + 1 >= len(chunks):
            continue
        right = chunks[i + 1]
        if right.kind == "VP":
            left = next((chunks[j] for j in range(i - 1, -1, -1) if chunks[j].kind == "VP"), None)
        elif right.kind == "NP":
            left = chunks[i - 1] if chunks[i - 1].kind == "NP" else None
        else:
            left = None
        if left is not None:
            attach(left.head, right.head, "conj")
            right.attached = True

    objects = set()
    for i, c in enumerate(chunks):
        if c.kind != "VP":
            continue
        before = neighbour(i, -1)
        if before is not None and chunks[before].kind == "NP" and chunks[before].head not in has_head:
            attach(c.head, chunks[before].head, "subj")
        after = neighbour(i, 1)
        if after is not None and chunks[after].kind == "NP" and chunks[after].head not in has_head:
            attach(c.head, chunks[after].head, "dobj")
            objects.add(after)
        for step in (-1, 1):
            j = i + step
            if 0 <= j < len(chunks) and chunks[j].kind == "ADV":
                attach(c.head, chunks[j].head, "advmod")

    # prepositional phrases
    for i, c in enumerate(chunks):
        if c.kind != "PREP" or i + 1 >= len(chunks) or chunks[i + 1].kind != "NP":
            continue
        attach(c.head, chunks[i + 1].head, "pobj")
        if i == 0:
            continue
        left = chunks[i - 1]
        if left.kind == "VP":
            attach(left.head, c.head, "prep")
        elif left.kind == "NP":
            if i - 1 in objects:
                verb = neighbour(i - 1, -1)
                attach(chunks[verb].head, c.head, "prep")
            else:
                attach(left.head, c.head, "prep")

    root = chunks[verbs[0]].head
    for c in chunks:
        if c.kind in ("NP", "VP", "ADV") and c.head != root and c.head not in has_head:
            attach(root, c.head, "root-attach")
    return graph


def unit_dependencies(unit):
    """Dependency graph over every sentence of a tokenized unit."""
    graph = DependencyGraph()
    for s in unit.sentences:
        graph.merge(build_dependencies(unit.tokens[s.start:s.end], offset=s.start))
    return graph


def dep_path_len(graph, a, b):
    """Shortest undirected path length, or None when unreachable."""
    if a == b:
        return 0
    if graph.sentence_of.get(a) != graph.sentence_of.get(b) or a not in graph.sentence_of:
        return None
    adj = graph.adjacency()
    seen = {a}
    queue = deque([(a, 0)])
    while queue:
        node, dist = queue.popleft()
        for nxt, _ in adj.get(node, ()):
            if nxt == b:
                return dist + 1
            if nxt not in seen:
                seen.add(nxt)
                queue.append((nxt, dist + 1))
    return None


def all_path_lengths(graph, sources):
    """BFS distances from each source; ``{source: {node: dist}}``."""
    adj = graph.adjacency()
    out = {}
    for a in sources:
        dist = {a: 0}
        queue = deque([a])
        while queue:
            node = queue.popleft()
            for nxt, _ in adj.get(node, ()):
                if nxt not in dist:
                    dist[nxt] = dist[node] + 1
                    queue.append(nxt)
        out[a] = dist
    return out


class SyntaxProvider:
    """Default tagger/parser pair; subclass to plug in another parser."""

    def pos_tag(self, tokens):
        return pos_tag(tokens)

    def dependencies(self, unit):
        return unit_dependencies(unit)
