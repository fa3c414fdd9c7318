"""Thread-parallel task fan-out with deterministic result order."""

from collections.abc import Callable, Sequence
from typing import Any

import numpy as np
from joblib import Parallel, delayed

from slag.logger import get_logger

logger = get_logger(__name__)

CHUNK_SIZE = 256


def chunk_indices(count: int, chunk_size: int = CHUNK_SIZE) -> list[np.ndarray]:
    if count <= 0:
        return []
    n_chunks = max(1, -(-count // chunk_size))
    return [chunk for chunk in np.array_split(np.arange(count), n_chunks) if chunk.size]


def run_parallel(
    function: Callable[..., Any], tasks: Sequence[tuple], workers: int = 1
) -> list[Any]:
    """Apply ``function`` to each argument tuple; results keep task order.

    Every task derives its random streams from its own arguments, so the output does
    not depend on the worker count.
    """
    if workers <= 1 or len(tasks) <= 1:
        return [function(*task) for task in tasks]
    logger.debug(f"Dispatching {len(tasks)} tasks to {workers} threads")
    return Parallel(n_jobs=workers, prefer="threads")(delayed(function)(*task) for task in tasks)
