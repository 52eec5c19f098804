"""Worker pool for sweep orchestration.

Sweep points are dispatched to a thread pool capped by the
LEAKYWIRE_THREADS environment variable; results are collected by a single
consumer in input order, so output files are deterministic regardless of
scheduling.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

__all__ = ["worker_count", "map_ordered"]


def worker_count() -> int:
    env = os.environ.get("LEAKYWIRE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


def map_ordered(fn, items):
    """Apply fn to each item on the pool; return results in input order."""
    items = list(items)
    if len(items) <= 1 or worker_count() == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(fn, items))
