"""Row-chunked evaluation with a fixed assembly order."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

ENV_THREADS = "GENFOURIER_THREADS"


def thread_count() -> int:
    raw = os.environ.get(ENV_THREADS, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def fill_rows(func, nrows: int, chunk: int = 64) -> np.ndarray:
    """Stack ``func(start, stop)`` blocks for consecutive row ranges.

    Blocks are computed independently and concatenated in row order, so the
    result does not depend on the number of worker threads.
    """
    bounds = [(i, min(i + chunk, nrows)) for i in range(0, nrows, chunk)]
    workers = thread_count()
    if workers == 1 or len(bounds) == 1:
        blocks = [func(a, b) for a, b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            blocks = list(pool.map(lambda ab: func(*ab), bounds))
    return np.concatenate(blocks, axis=0)
