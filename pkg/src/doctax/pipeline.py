"""Text to feature vectors, shared by the CLI stages."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

from .corpus import DocumentUnit, make_unit
from .errors import EmptyInput
from .features import analyze, assemble
from .parallel import worker_count

_CTX = {}


def to_unit(text, unit_id="unit", format="plain", gold_label=None):
    """Tokenized unit; whitespace-only text becomes an empty unit."""
    try:
        return make_unit(text, format=format, unit_id=unit_id, gold_label=gold_label)
    except EmptyInput:
        return DocumentUnit(id=unit_id, raw_text="", gold_label=gold_label)


def _init(stats, vc, gazetteers):
    _CTX.update(stats=stats, vc=vc, gazetteers=gazetteers)


def _one(item):
    uid, text, fmt = item
    return assemble(to_unit(text, uid, fmt), _CTX["stats"], _CTX["vc"], _CTX["gazetteers"])


def featurize(items, stats, vc_model=None, gazetteers=None):
    """Feature vectors for ``(unit_id, text[, format])`` items, in input order."""
    items = [(i[0], i[1], i[2] if len(i) > 2 else "plain") for i in items]
    workers = min(worker_count(), len(items))
    if workers <= 1 or len(items) < 64:
        _init(stats, vc_model, gazetteers)
        return [_one(it) for it in items]
    with ProcessPoolExecutor(workers, initializer=_init, initargs=(stats, vc_model, gazetteers)) as pool:
        return list(pool.map(_one, items, chunksize=32))


def analyze_text(text, stats, vc_model=None, gazetteers=None, unit_id="unit", format="plain"):
    return analyze(to_unit(text, unit_id, format), stats, vc_model, gazetteers)
