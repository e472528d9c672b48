"""Deterministic chunked map with ordered reduction.

Work is always split into the same chunks regardless of worker count, and
chunk results are combined in chunk order, so results do not depend on the
number of workers.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def fixed_chunks(start: int, stop: int, size: int) -> List[tuple]:
    """Half-open ranges [a, b) of at most ``size`` covering [start, stop)."""
    return [(a, min(a + size, stop)) for a in range(start, stop, size)]


def ordered_map(func: Callable[[T], R], items: Sequence[T], threads: int = 1) -> List[R]:
    """Apply ``func`` to every item, returning results in input order."""
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(func, items))
