"""Process-level parallel map capped by ``DOCTAX_THREADS`` (0 or unset: all cores)."""

import os
from concurrent.futures import ProcessPoolExecutor


def worker_count():
    raw = os.environ.get("DOCTAX_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        n = 0
    return max(1, n if n > 0 else (os.cpu_count() or 1))


def pmap(fn, items, chunksize=1):
    """Ordered map; serial when one worker is allowed or there is one item."""
    items = list(items)
    workers = min(worker_count(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items, chunksize=chunksize))
