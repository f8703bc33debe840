"""Thread-count resolution and chunked parallel map over cells."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

ENV_THREADS = "HOMOTOPYKIT_THREADS"


def resolve_threads(threads=None) -> int:
    if threads is None:
        env = os.environ.get(ENV_THREADS)
        if env:
            threads = int(env)
    if threads is None:
        threads = os.cpu_count() or 1
    return max(1, int(threads))


def chunked_map(func, n_items, threads=None, chunk=8192):
    """Apply ``func(start, stop)`` over index chunks, results in chunk order.

    numpy's batched linear algebra releases the GIL, so threads give real
    speedups on the per-tet kernels.  Output order never depends on
    scheduling.
    """
    bounds = [(s, min(s + chunk, n_items)) for s in range(0, n_items, chunk)]
    threads = resolve_threads(threads)
    if threads == 1 or len(bounds) <= 1:
        return [func(a, b) for a, b in bounds]
    with ThreadPoolExecutor(max_workers=min(threads, len(bounds))) as pool:
        return list(pool.map(lambda ab: func(*ab), bounds))
