import os
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Sequence, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

THREADS_ENV = 'BRODYLAB_THREADS'


def thread_count() -> int:
    """Worker cap from ``BRODYLAB_THREADS``, defaulting to the logical core count."""
    raw = os.environ.get(THREADS_ENV)
    if raw is None or raw.strip() == '':
        return max(1, os.cpu_count() or 1)
    try:
        value = int(raw)
    except ValueError:
        logger.warning(f"Ignoring {THREADS_ENV}={raw!r}: not an integer, using 1 thread")
        return 1
    if value < 1:
        logger.warning(f"Ignoring {THREADS_ENV}={raw!r}: must be positive, using 1 thread")
        return 1
    return value


def map_ordered(fn: Callable[[T], R], items: Iterable[T]) -> List[R]:
    """Apply ``fn`` to every item on a thread pool and return results in input order.

    numpy releases the GIL inside its kernels, so row blocks of a grid scan run
    concurrently. With one worker the map runs inline.
    """
    items = list(items)
    workers = min(thread_count(), len(items))
    if workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(fn, items))


def row_blocks(n_rows: int, block: int = 64) -> List[slice]:
    """Split ``range(n_rows)`` into contiguous slices of at most ``block`` rows."""
    return [slice(start, min(start + block, n_rows)) for start in range(0, n_rows, block)]


def ordered_sum(partials: Sequence[np.ndarray]) -> float:
    """Sum per-block partial sums in block order with numpy's pairwise summation."""
    if len(partials) == 0:
        return 0.0
    return float(np.sum(np.asarray(partials, dtype=float)))
