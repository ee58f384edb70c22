"""Term lists (directives, domain tags) and the version-control domain model.

A snapshot is a directory of ``.html``/``.txt`` pages with a ``manifest.tsv``
of ``filename<TAB>title`` lines. The domain model keeps the pages whose
bag-of-words cosine to the root page reaches the threshold, collects seed
phrases from the root page's title, headings and link anchors, and builds
co-occurrence statistics over the kept pages.
"""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from html.parser import HTMLParser
from pathlib import Path

from . import resources
from ._io import write_atomic
from .corpus import content_words, ingest, make_unit, tokenize_and_segment
from .errors import CorruptFile, EmptyGazetteer, EmptyInput, RootPageMissing, VersionMismatch
from .stats import DEFAULT_WINDOW, build_stats, dumps_stats, parse_stats

MAX_ENTRY_WORDS = 4
DEFAULT_THRESHOLD = 0.15
GAZETTEER_FILES = {"directives": "directives.txt", "domain_tags": "domain_tags.txt"}


def _lemma_sequence(text):
    try:
        unit = make_unit(text)
    except EmptyInput:
        return ()
    return tuple(t.lemma.lower() for t in unit.tokens)


@dataclass(frozen=True)
class Gazetteer:
    name: str
    entries: frozenset
    source: str = ""
    sequences: tuple = field(default=(), compare=False, repr=False)

    @classmethod
    def from_terms(cls, name, terms, source=""):
        seqs = set()
        for term in terms:
            seq = _lemma_sequence(term)
            if 0 < len(seq) <= MAX_ENTRY_WORDS:
                seqs.add(seq)
        if not seqs:
            raise EmptyGazetteer(f"gazetteer {name!r} has no usable entries")
        ordered = tuple(sorted(seqs, key=lambda s: (-len(s), s)))
        return cls(name, frozenset(" ".join(s) for s in seqs), source, ordered)

    def __len__(self):
        return len(self.entries)

    def __contains__(self, phrase):
        return phrase in self.entries

    @property
    def max_len(self):
        return max(len(s) for s in self.sequences)


def load_gazetteer(path, name=None):
    """One entry per line; ``#`` comment lines and blanks are skipped."""
    path = Path(path) if not hasattr(path, "read_text") else path
    name = name or Path(str(path)).stem
    return Gazetteer.from_terms(name, resources.read_lines(path), source=str(path))


def load_gazetteers(directory=None):
    """Directive and domain-tag gazetteers from ``directory`` (bundled when None)."""
    out = {}
    for key, filename in GAZETTEER_FILES.items():
        path = resources.gazetteer_path(key) if directory is None else Path(directory) / filename
        if directory is not None and not path.is_file():
            raise EmptyGazetteer(f"missing gazetteer file {path}")
        out[key] = load_gazetteer(path, key)
    return out


# ---------------------------------------------------------------------------
# Similarity


def first_paragraphs(text, n=2):
    paragraphs = [p for p in re.split(r"\n\s*\n", text) if p.strip()]
    return "\n\n".join(paragraphs[:n])


def _bag(text):
    text = first_paragraphs(text)
    if not text.strip():
        return Counter()
    return Counter(content_words(make_unit(text)))


def _cosine(a, b):
    dot = sum(c * b[t] for t, c in a.items() if t in b)
    if not dot:
        return 0.0
    norm = math.sqrt(sum(c * c for c in a.values())) * math.sqrt(sum(c * c for c in b.values()))
    return min(1.0, dot / norm)


def bow_cosine(a, b):
    """Cosine of term-frequency vectors over the first two paragraphs."""
    return _cosine(_bag(a), _bag(b))


# ---------------------------------------------------------------------------
# Snapshots


class _HeadingCollector(HTMLParser):
    KEEP = {"a", "title", "h1", "h2", "h3", "h4", "h5", "h6"}

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.open = []
        self.found = []

    def handle_starttag(self, tag, attrs):
        if tag in self.KEEP:
            self.open.append([tag, []])

    def handle_endtag(self, tag):
        for i in range(len(self.open) - 1, -1, -1):
            if self.open[i][0] == tag:
                _, parts = self.open.pop(i)
                text = " ".join("".join(parts).split())
                if text:
                    self.found.append(text)
                return

    def handle_data(self, data):
        for entry in self.open:
            entry[1].append(data)


@dataclass
class SnapshotPage:
    filename: str
    title: str
    raw: bytes

    @property
    def is_html(self):
        return self.filename.lower().endswith((".html", ".htm"))

    def unit(self):
        unit = ingest(self.raw, format="html" if self.is_html else "plain", unit_id=self.filename,
                      source=self.filename)
        return tokenize_and_segment(unit)


def read_snapshot(directory):
    directory = Path(directory)
    manifest = directory / "manifest.tsv"
    if not manifest.is_file():
        raise CorruptFile(f"{directory}: no manifest.tsv")
    pages = []
    for row in resources.read_table(manifest):
        if len(row) < 2:
            raise CorruptFile(f"bad manifest row {row!r}")
        path = directory / row[0]
        if not path.is_file():
            raise CorruptFile(f"manifest lists missing page {row[0]}")
        pages.append(SnapshotPage(row[0], row[1], path.read_bytes()))
    return pages


def _seed_phrases(texts):
    """Maximal stop-word-free runs of 1-4 content lemmas."""
    seeds = set()
    for text in texts:
        try:
            unit = make_unit(text)
        except EmptyInput:
            continue
        run = []
        for tok in unit.tokens + [None]:
            if tok is not None and not tok.is_stopword and tok.pos.value not in ("PUNCT", "NUM"):
                run.append(tok.lemma.lower())
                continue
            if 0 < len(run) <= MAX_ENTRY_WORDS:
                seeds.add(tuple(run))
            run = []
    return seeds


@dataclass(frozen=True)
class VcDomainModel:
    seeds: Gazetteer
    stats: object
    threshold: float = DEFAULT_THRESHOLD
    root: str = ""
    accepted: tuple = ()


def build_vc_model(snapshot_dir, root_page, threshold=DEFAULT_THRESHOLD, window_k=DEFAULT_WINDOW):
    """Filter a snapshot by similarity to ``root_page`` and build the model.

    ``root_page`` names the root by filename or by manifest title. A page is
    kept when its cosine to the root is at least ``threshold``.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    pages = read_snapshot(snapshot_dir)
    root = next((p for p in pages if root_page in (p.filename, p.title)), None)
    if root is None:
        raise RootPageMissing(f"root page {root_page!r} not in snapshot")
    units = {p.filename: p.unit() for p in pages}
    root_bag = Counter(content_words(_paragraph_unit(units[root.filename])))
    accepted = [p for p in pages
                if p is root or _cosine(Counter(content_words(_paragraph_unit(units[p.filename]))), root_bag) >= threshold]
    stats = build_stats([units[p.filename] for p in accepted], window_k)

    texts = [root.title]
    if root.is_html:
        collector = _HeadingCollector()
        collector.feed(root.raw.decode("utf-8", errors="replace"))
        collector.close()
        texts += collector.found
    seeds = [s for s in _seed_phrases(texts) if all(w in stats for w in s)]
    if not seeds:
        raise EmptyGazetteer("root page yields no seed phrases")
    gaz = Gazetteer("vc_seeds", frozenset(" ".join(s) for s in seeds), root.filename,
                    tuple(sorted(seeds, key=lambda s: (-len(s), s))))
    return VcDomainModel(gaz, stats, threshold, root.filename, tuple(p.filename for p in accepted))


def _paragraph_unit(unit):
    text = first_paragraphs(unit.raw_text)
    if not text.strip():
        return unit
    return make_unit(text)


def vc_model_from_seeds(seeds, stats, threshold=DEFAULT_THRESHOLD):
    """Assemble a model directly from seed terms and prepared statistics."""
    gaz = Gazetteer.from_terms("vc_seeds", seeds)
    return VcDomainModel(gaz, stats, threshold)


# ---------------------------------------------------------------------------
# Persistence

VC_MAGIC = "DTXVC"
VC_VERSION = 1


def dumps_vc(model):
    seeds = sorted(" ".join(s) for s in model.seeds.sequences)
    lines = [f"{VC_MAGIC}\t{VC_VERSION}", f"threshold\t{model.threshold!r}", f"root\t{model.root}",
             f"[seeds]\t{len(seeds)}", *seeds, f"[accepted]\t{len(model.accepted)}", *model.accepted]
    return "\n".join(lines) + "\n" + dumps_stats(model.stats)


def save_vc(model, path):
    write_atomic(path, dumps_vc(model))


def _count(line, key):
    parts = line.split("\t")
    if len(parts) != 2 or parts[0] != key:
        raise CorruptFile(f"expected {key!r}")
    try:
        return parts[1] if key in ("threshold", "root") else int(parts[1])
    except ValueError:
        raise CorruptFile(f"bad {key} value") from None


def loads_vc(text):
    lines = text.split("\n")
    try:
        head = lines[0].split("\t")
        if head[0] != VC_MAGIC or len(head) != 2:
            raise CorruptFile("not a version-control model (bad magic)")
        if head[1] != str(VC_VERSION):
            raise VersionMismatch(f"vc model version {head[1]}, expected {VC_VERSION}")
        try:
            threshold = float(_count(lines[1], "threshold"))
        except ValueError:
            raise CorruptFile("bad threshold") from None
        root = _count(lines[2], "root")
        n = _count(lines[3], "[seeds]")
        seeds = [tuple(s.split(" ")) for s in lines[4:4 + n]]
        pos = 4 + n
        m = _count(lines[pos], "[accepted]")
        accepted = tuple(lines[pos + 1:pos + 1 + m])
        pos += 1 + m
    except IndexError:
        raise CorruptFile("vc model is truncated") from None
    if len(seeds) != n or len(accepted) != m or not seeds:
        raise CorruptFile("vc model is truncated")
    stats, _ = parse_stats(lines, pos)
    gaz = Gazetteer("vc_seeds", frozenset(" ".join(s) for s in seeds), root,
                    tuple(sorted(seeds, key=lambda s: (-len(s), s))))
    return VcDomainModel(gaz, stats, threshold, root, accepted)


def load_vc(path):
    try:
        return loads_vc(Path(path).read_text(encoding="utf-8"))
    except UnicodeDecodeError:
        raise CorruptFile(f"{path}: not UTF-8 text") from None
