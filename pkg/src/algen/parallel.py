"""Order-preserving parallel map for the pure per-point sites (grid scans, u_t)."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from itertools import islice


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get("ALGEN_JOBS", "1")))
    except ValueError:
        return 1


def pmap(fn, items, jobs: int | None = None) -> list:
    items = list(items)
    jobs = default_jobs() if jobs is None else jobs
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def chunked(iterable, size: int):
    it = iter(iterable)
    while True:
        block = list(islice(it, size))
        if not block:
            return
        yield block
