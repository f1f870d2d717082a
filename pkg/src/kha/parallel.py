"""Order-preserving map over worker processes, sized by KHA_THREADS."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def thread_count() -> int:
    raw = os.environ.get("KHA_THREADS", "1").strip() or "1"
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"KHA_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ValueError(f"KHA_THREADS must be a positive integer, got {raw!r}")
    return n


def pmap(fn: Callable[[T], R], items: Iterable[T], workers: int | None = None) -> list[R]:
    """map(fn, items) as a list; results come back in input order whatever the pool size."""
    items = list(items)
    n = thread_count() if workers is None else workers
    n = min(n, len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
