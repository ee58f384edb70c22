"""Document units: ingestion, tokenization, segmentation and lemmatization.

A :class:`DocumentUnit` is the fragment of documentation that receives a
single knowledge-type label. :func:`ingest` turns raw bytes into a unit
(HTML code markup is remembered as ``code_spans``) and
:func:`tokenize_and_segment` fills in tokens, sentences, tags and lemmas.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from html.parser import HTMLParser
from typing import Optional

from . import resources
from .errors import EmptyInput


class PosTag(str, enum.Enum):
    NOUN = "NOUN"
    PROPER_NOUN = "PROPER_NOUN"
    VERB = "VERB"
    ADJ = "ADJ"
    ADV = "ADV"
    PRON = "PRON"
    PREP = "PREP"
    DET = "DET"
    CONJ = "CONJ"
    NUM = "NUM"
    PUNCT = "PUNCT"
    CODE = "CODE"
    OTHER = "OTHER"


CLOSED_TAGS = frozenset({PosTag.PRON, PosTag.PREP, PosTag.DET, PosTag.CONJ})


@dataclass
class Token:
    surface: str
    char_start: int
    char_end: int
    lemma: str = ""
    pos: PosTag = PosTag.OTHER
    is_stopword: bool = False
    is_code_like: bool = False

    def __post_init__(self):
        if not self.lemma:
            self.lemma = self.surface


@dataclass(frozen=True)
class Sentence:
    """Half-open token index range ``[start, end)`` into the unit's tokens."""

    start: int
    end: int

    def __len__(self):
        return self.end - self.start

    def __iter__(self):
        return iter(range(self.start, self.end))


@dataclass
class DocumentUnit:
    id: str
    raw_text: str
    source: str = ""
    code_spans: list = field(default_factory=list)
    tokens: list = field(default_factory=list)
    sentences: list = field(default_factory=list)
    gold_label: Optional[str] = None
    decode_errors: int = 0
    markup_warnings: int = 0

    def sentence_tokens(self, sentence):
        return self.tokens[sentence.start:sentence.end]

    def sentence_of(self, token_index):
        for i, s in enumerate(self.sentences):
            if s.start <= token_index < s.end:
                return i
        raise IndexError(token_index)


# ---------------------------------------------------------------------------
# Ingestion

CODE_TAGS = frozenset({"code", "pre", "tt", "kbd", "samp"})
VOID_TAGS = frozenset({
    "area", "base", "br", "col", "embed", "hr", "img", "input", "link", "meta",
    "param", "source", "track", "wbr",
})
# End tags that HTML lets authors omit; never reported as unbalanced.
OPTIONAL_END = frozenset({
    "p", "li", "dt", "dd", "tr", "td", "th", "thead", "tbody", "tfoot", "option",
    "colgroup", "html", "head", "body",
})
BLOCK_TAGS = frozenset({
    "p", "div", "section", "article", "header", "footer", "blockquote", "dl", "dt",
    "dd", "ul", "ol", "li", "table", "tr", "h1", "h2", "h3", "h4", "h5", "h6",
    "pre", "title", "body", "html", "hr", "br",
})
SKIP_TAGS = frozenset({"script", "style", "head"})


class _MarkupStripper(HTMLParser):
    """Collect text pieces and the piece ranges that sit inside code markup.

    Unbalanced tags are re-inserted as literal text once the whole document
    has been seen, so code spans are only computed in :func:`_render`.
    """

    def __init__(self):
        super().__init__(convert_charrefs=True)
        self.pieces = []  # (text, is_break)
        self.stack = []  # (tag, piece index at open, literal start-tag text)
        self.literal = {}  # piece index -> literal text to insert before it
        self.code_regions = []
        self.warnings = 0
        self.skip = 0

    def _code_depth(self):
        return sum(1 for tag, _, _ in self.stack if tag in CODE_TAGS)

    def handle_starttag(self, tag, attrs):
        if tag in SKIP_TAGS:
            self.skip += 1
            return
        if tag in BLOCK_TAGS and not self._code_depth():
            self.pieces.append(("\n" if tag == "br" else "\n\n", True))
        if tag in VOID_TAGS or (tag in OPTIONAL_END and tag not in CODE_TAGS):
            return
        self.stack.append((tag, len(self.pieces), self.get_starttag_text() or f"<{tag}>"))

    def handle_startendtag(self, tag, attrs):
        if tag in BLOCK_TAGS and not self._code_depth():
            self.pieces.append(("\n", True))

    def handle_endtag(self, tag):
        if tag in SKIP_TAGS:
            self.skip = max(0, self.skip - 1)
            return
        if tag in VOID_TAGS:
            return
        if tag not in [t for t, _, _ in self.stack]:
            if tag not in OPTIONAL_END:
                self.warnings += 1
                self.pieces.append((f"</{tag}>", False))
            return
        while self.stack:
            name, start, text = self.stack.pop()
            if name == tag:
                if name in CODE_TAGS and not self._code_depth():
                    self.code_regions.append((start, len(self.pieces)))
                break
            self._unclosed(start, text)
        if tag in BLOCK_TAGS and not self._code_depth():
            self.pieces.append(("\n\n", True))

    def _unclosed(self, start, text):
        self.warnings += 1
        self.literal[start] = self.literal.get(start, "") + text

    def handle_data(self, data):
        if not self.skip:
            self.pieces.append((data, False))

    def finish(self):
        self.close()
        while self.stack:
            _, start, text = self.stack.pop()
            self._unclosed(start, text)


def _render(stripper):
    """Assemble text outside code collapsed, text inside code verbatim."""
    in_code = {}
    for first, end in stripper.code_regions:
        for i in range(first, end):
            in_code[i] = first
    out = []
    length = 0
    pending = ""  # whitespace owed before the next visible character
    spans = {}

    def emit(text):
        nonlocal length, pending
        if pending and length:
            out.append(pending)
            length += len(pending)
        pending = ""
        out.append(text)
        length += len(text)

    def owe(ws):
        nonlocal pending
        if "\n\n" in ws or "\n\n" in pending:
            pending = "\n\n"
        elif "\n" in ws or "\n" in pending:
            pending = "\n"
        else:
            pending = " "

    def emit_text(text):
        for part in re.split(r"(\s+)", text):
            if not part:
                continue
            if part.isspace():
                owe(part)
            else:
                emit(part)

    for i in range(len(stripper.pieces) + 1):
        if i in stripper.literal:
            emit_text(stripper.literal[i])
        if i == len(stripper.pieces):
            break
        text, is_break = stripper.pieces[i]
        if i in in_code:
            core = text.strip()
            if not core:
                continue
            lead = text[: len(text) - len(text.lstrip())]
            if lead:
                owe(lead)
            emit(core)
            a, b = spans.get(in_code[i], (length - len(core), length))
            spans[in_code[i]] = (a, length)
            trail = text[len(text.rstrip()):]
            if trail:
                owe(trail)
        elif is_break:
            owe(text)
        else:
            emit_text(text)
    return "".join(out), sorted(spans.values())


def _decode(data):
    if isinstance(data, str):
        return data, 0
    text = data.decode("utf-8", errors="replace")
    genuine = data.count("�".encode("utf-8"))
    return text, text.count("�") - genuine


def ingest(data, format="plain", unit_id="unit", source="", gold_label=None):
    """Build a :class:`DocumentUnit` from raw bytes (or text).

    For ``format="html"`` text inside code-like elements is kept verbatim and
    its character range recorded in ``code_spans``; other tags are dropped
    and entities decoded. An unbalanced tag is kept as literal text and
    counted in ``markup_warnings``.
    """
    text, bad = _decode(data)
    if not text.strip():
        raise EmptyInput("input has no non-whitespace characters")
    if format == "plain":
        raw, spans, warnings = text.strip(), [], 0
    elif format == "html":
        stripper = _MarkupStripper()
        stripper.feed(text)
        stripper.finish()
        raw, spans = _render(stripper)
        warnings = stripper.warnings
        if not raw.strip():
            raise EmptyInput("markup contains no text")
    else:
        raise ValueError(f"unknown format {format!r}")
    return DocumentUnit(
        id=unit_id, raw_text=raw, source=source, code_spans=sorted(spans),
        gold_label=gold_label, decode_errors=bad, markup_warnings=warnings,
    )


# ---------------------------------------------------------------------------
# Tokenization

_LETTER = r"[^\W\d_]"


def _token_pattern(abbrevs):
    parts = []
    if abbrevs:
        alts = "|".join(re.escape(a) for a in sorted(abbrevs, key=len, reverse=True))
        parts.append(rf"(?P<abbr>(?i:{alts}))(?!\w)")
    parts += [
        r"(?P<url>(?:https?|ftp)://[^\s<>\"']*[^\s<>\"'.,;:!?)\]])",
        rf"(?P<word>{_LETTER}\w*(?:['’]{_LETTER}+|-\w+)+)",
        r"(?P<ident>[^\W\d]\w*(?:\.[^\W\d]\w*)*(?:\([^()\s]*\))?)",
        r"(?P<num>\d+(?:[.,]\d+)*(?:[^\W\d_]\w*)?)",
        r"(?P<punct>[^\w\s])",
        r"(?P<other>\S)",
    ]
    return re.compile("|".join(parts))


_PATTERNS = {}


def _pattern(abbrevs):
    key = tuple(abbrevs)
    if key not in _PATTERNS:
        _PATTERNS[key] = _token_pattern(key)
    return _PATTERNS[key]


def is_code_like(surface):
    """Identifier heuristic for text without markup."""
    if "_" in surface and any(c.isalpha() for c in surface):
        return True
    if surface.endswith(")") and "(" in surface and surface[0].isalpha():
        return True
    if "://" in surface:
        return True
    core = surface.split("(", 1)[0]
    return bool(re.search(r"\w\.\w", core)) and any(c.isalpha() for c in core)


def _split_regions(text, spans):
    pos = 0
    for a, b in spans:
        if a > pos:
            yield pos, a, False
        yield a, b, True
        pos = b
    if pos < len(text):
        yield pos, len(text), False


def _raw_tokens(text, spans, abbrevs):
    pattern = _pattern(abbrevs)
    tokens = []
    for a, b, code in _split_regions(text, spans):
        if code:
            for m in re.finditer(r"\S+", text[a:b]):
                tokens.append(Token(m.group(), a + m.start(), a + m.end(), is_code_like=True))
            continue
        for m in pattern.finditer(text, a, b):
            kind = m.lastgroup
            tok = Token(m.group(), m.start(), m.end())
            if kind == "punct" or kind == "other" and not m.group().isalnum():
                tok.pos = PosTag.PUNCT
            elif kind == "num":
                tok.pos = PosTag.NUM
            elif kind in ("ident", "url", "word"):
                tok.is_code_like = is_code_like(tok.surface)
            tokens.append(tok)
    return tokens


_ENDERS = frozenset(".!?")


def _sentence_breaks(text, tokens):
    """Indices i such that a sentence ends after token i."""
    breaks = []
    for i in range(len(tokens) - 1):
        tok, nxt = tokens[i], tokens[i + 1]
        gap = text[tok.char_end:nxt.char_start]
        if "\n\n" in gap.replace(" ", "").replace("\t", ""):
            breaks.append(i)
        elif (tok.pos == PosTag.PUNCT and tok.surface in _ENDERS and gap
              and gap.isspace() and nxt.surface[:1].isupper()):
            breaks.append(i)
    return breaks


def tokenize_and_segment(unit, abbreviations=None, tagger=None):
    """Populate ``unit.tokens`` and ``unit.sentences`` in place; returns the unit.

    Tokens are then tagged (``tagger`` defaults to the bundled rule-based
    tagger) and lemmatized.
    """
    abbrevs = resources.abbreviations() if abbreviations is None else tuple(abbreviations)
    tokens = _raw_tokens(unit.raw_text, unit.code_spans, abbrevs)
    stop = resources.stopwords()
    for tok in tokens:
        if tok.is_code_like:
            tok.pos = PosTag.CODE
        tok.is_stopword = not tok.is_code_like and tok.surface.lower() in stop

    sentences = []
    start = 0
    for i in _sentence_breaks(unit.raw_text, tokens):
        sentences.append(Sentence(start, i + 1))
        start = i + 1
    if start < len(tokens):
        sentences.append(Sentence(start, len(tokens)))

    if tagger is None:
        from .syntax import pos_tag as tagger
    for s in sentences:
        tags = tagger(tokens[s.start:s.end])
        for tok, tag in zip(tokens[s.start:s.end], tags):
            tok.pos = tag
            tok.lemma = lemmatize(tok.surface, tag)
    unit.tokens = tokens
    unit.sentences = sentences
    return unit


def make_unit(text, format="plain", unit_id="unit", source="", gold_label=None, **kwargs):
    """Ingest and tokenize in one step."""
    data = text.encode("utf-8") if isinstance(text, str) else text
    unit = ingest(data, format=format, unit_id=unit_id, source=source, gold_label=gold_label)
    return tokenize_and_segment(unit, **kwargs)


def content_words(unit):
    """Lemmas of the unit without stop words and punctuation, in order."""
    return [t.lemma for t in unit.tokens if not t.is_stopword and t.pos != PosTag.PUNCT]


# ---------------------------------------------------------------------------
# Lemmatization

_VOWELS = set("aeiou")


def _known(word):
    return word in resources.open_lexicon()


def _cvc(stem):
    return (len(stem) >= 3 and stem[-1] not in _VOWELS and stem[-1] not in "wxy"
            and stem[-2] in _VOWELS and stem[-3] not in _VOWELS)


def _verb_stem_candidates(stem):
    cands = []
    if _cvc(stem):
        cands.append(stem + "e")
    cands.append(stem)
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS:
        cands.append(stem[:-1])
    if stem + "e" not in cands:
        cands.append(stem + "e")
    return cands


def _fallback_stem(stem):
    if len(stem) >= 3 and stem[-1] == stem[-2] and stem[-1] not in _VOWELS | set("lsz"):
        return stem[:-1]
    if stem.endswith(("at", "bl", "iz", "v", "us", "dg", "ur", "it", "c")) or _cvc(stem) and len(stem) <= 4:
        return stem + "e"
    return stem


def _strip_participle(word, require_known):
    for suffix in ("ing", "ed"):
        if not word.endswith(suffix):
            continue
        stem = word[: -len(suffix)]
        if len(stem) < 3 if suffix == "ed" else len(stem) < 2:
            return None
        if suffix == "ed" and stem.endswith("i"):
            cand = stem[:-1] + "y"
            if _known(cand) or not require_known:
                return cand
        for cand in _verb_stem_candidates(stem):
            if len(cand) >= 2 and _known(cand):
                return cand
        if require_known or _known(word):
            return None
        return _fallback_stem(stem)
    return None


def _strip_plural(word):
    if len(word) <= 3 or not word.endswith("s") or word.endswith(("ss", "us", "is")):
        return None
    cands = []
    if word.endswith("ies") and len(word) > 4:
        cands.append(word[:-3] + "y")
    if word.endswith("es") and word[:-2].endswith(("s", "x", "z", "ch", "sh", "o")):
        cands.append(word[:-2])
    cands.append(word[:-1])
    for cand in cands:
        if _known(cand):
            return cand
    return cands[0]


def _lemma_step(word, pos):
    for lemma, only in resources.lemma_exceptions().get(word, ()):
        if only is None or only == pos.value:
            return lemma
    if pos == PosTag.NOUN:
        return _strip_plural(word) or word
    if pos == PosTag.VERB:
        stripped = _strip_participle(word, require_known=False)
        if stripped:
            return stripped
        if word.endswith("s") and not word.endswith("ss"):
            return _strip_plural(word) or word
        return word
    if pos == PosTag.ADJ:
        return _strip_participle(word, require_known=True) or word
    return word


def lemmatize(surface, pos):
    """Rule-based English lemma of ``surface`` under coarse tag ``pos``.

    CODE tokens come back unchanged; everything else is lowercased. The
    single-step rules are applied to a fixed point, so the function is
    idempotent.
    """
    if not surface:
        raise ValueError("empty surface")
    pos = PosTag(pos)
    if pos == PosTag.CODE:
        return surface
    word = surface.lower()
    if pos in CLOSED_TAGS or pos in (PosTag.PROPER_NOUN, PosTag.PUNCT, PosTag.NUM, PosTag.ADV, PosTag.OTHER):
        return word
    seen = {word}
    while True:
        nxt = _lemma_step(word, pos)
        if nxt == word or nxt in seen or not nxt:
            return word
        seen.add(nxt)
        word = nxt
