"""
Thread-pool helpers for independent numerical work items.
"""

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

from src.config.configurations import get_settings
from src.utils.exceptions import CssdParameterError

T = TypeVar("T")
R = TypeVar("R")


def get_thread_count(requested: Optional[int] = None) -> int:
    """
    Number of worker threads to use.

    Args:
        requested: explicit thread count; None means the ``CSSD_THREADS`` setting

    Returns:
        The requested count, capped by ``CSSD_THREADS``

    Raises:
        CssdParameterError: If requested is smaller than 1
    """
    cap = get_settings().threads
    if requested is None:
        return cap
    if requested < 1:
        raise CssdParameterError(f"thread count must be at least 1, got {requested}")
    return min(requested, cap)


def ordered_map(func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None) -> List[R]:
    """
    Apply func to every item, possibly in parallel, keeping the input order.

    A single thread runs inline without creating a pool. The first exception
    raised by func is re-raised.
    """
    items = list(items)
    workers = min(get_thread_count(threads), max(len(items), 1))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers, thread_name_prefix="cssd") as executor:
        return list(executor.map(func, items))
