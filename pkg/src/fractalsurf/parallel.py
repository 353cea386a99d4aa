"""Worker-count policy shared by the data-parallel helpers."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_VAR = "FSK_THREADS"


def worker_count(requested: int | None = None) -> int:
    """Number of worker threads: explicit request, else ``FSK_THREADS``, else CPU count.

    A value of 0 (or an unset / unparsable variable) means automatic.
    """
    if requested is None:
        try:
            requested = int(os.environ.get(ENV_VAR, "0"))
        except ValueError:
            requested = 0
    if requested <= 0:
        requested = os.cpu_count() or 1
    return requested


def parallel_map(func, items, workers: int | None = None) -> list:
    items = list(items)
    n = min(worker_count(workers), len(items))
    if n <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(func, items))
