"""
Parallel evaluation of independent samples
"""
from typing import Callable, Iterable, List, Optional, TypeVar

from joblib import Parallel, delayed

from tachyon.core.config import settings
from tachyon.core.logging import get_logger

logger = get_logger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], workers: Optional[int] = None) -> List[R]:
    """
    Apply `fn` to every item, results in input order.

    Separate processes (loky backend) keep each evaluation's mpmath precision
    context private, so output does not depend on the worker count.
    """
    items = list(items)
    n_jobs = settings.workers if workers is None or workers == 0 else workers

    if n_jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]

    logger.debug(f"Dispatching {len(items)} evaluations to {n_jobs} workers")
    return Parallel(n_jobs=n_jobs, backend="loky")(delayed(fn)(item) for item in items)
