# -*- coding: utf-8 -*-
"""Order-preserving process pool used by the bootstrap and the simulation study."""

from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, List, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """Apply ``func`` to every item, returning results in input order.

    With ``workers <= 1`` everything runs in the calling process. Otherwise the
    items are spread over a process pool; ``func`` must be picklable (a module
    level function or a ``functools.partial`` of one).
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    chunksize = max(1, len(items) // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items, chunksize=chunksize))
