"""
Ejecución concurrente con resultados en el orden de entrada.
"""
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from spin_squeezing.services.config import get_config

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def resolve_jobs(jobs: Optional[int] = None) -> int:
    """Número de hilos: argumento, después `parallel.jobs`, después los CPUs disponibles."""
    if jobs is None:
        jobs = get_config().get('parallel.jobs')
    if jobs is None:
        jobs = os.cpu_count() or 1
    return max(1, int(jobs))


def map_ordered(func: Callable[[T], R], items: Sequence[T], jobs: Optional[int] = None) -> List[R]:
    """Aplica `func` a cada elemento; LAPACK libera el GIL, así que los hilos escalan."""
    items = list(items)
    workers = min(resolve_jobs(jobs), len(items))
    if workers <= 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))
