"""
Seed streams and chunked parallel maps

Sampling work is cut into fixed-size chunks, each with its own generator
spawned from the master seed. Workers only decide which thread runs a chunk,
so results are identical for any worker count.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Sequence, TypeVar

import numpy as np

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')

CHUNK_SIZE = 65_536


def seed_streams(seed: int, count: int) -> List[np.random.Generator]:
    """
    Derive independent generators from (master seed, stream index)

    Args:
        seed: Master seed
        count: Number of streams

    Returns:
        One numpy Generator per stream
    """
    children = np.random.SeedSequence(seed).spawn(count)
    return [np.random.default_rng(child) for child in children]


def chunk_sizes(total: int, chunk_size: int = CHUNK_SIZE) -> List[int]:
    """Split a sample count into fixed-size chunks (the last one may be short)"""
    if total <= 0:
        return []
    full, rest = divmod(total, chunk_size)
    return [chunk_size] * full + ([rest] if rest else [])


def chunked_map(fn: Callable[[T], R], jobs: Sequence[T], workers: int = 1) -> List[R]:
    """
    Apply fn to every job, possibly on a thread pool, preserving job order

    Args:
        fn: Job function (numpy-heavy work releases the GIL)
        jobs: Job descriptions
        workers: Thread count; 1 runs inline

    Returns:
        Results in job order
    """
    if workers <= 1 or len(jobs) <= 1:
        return [fn(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def sampled_chunks(total: int, seed: int,
                   chunk_size: int = CHUNK_SIZE) -> List[tuple]:
    """Pair every chunk size with its own generator: [(size, rng), ...]"""
    sizes = chunk_sizes(total, chunk_size)
    return list(zip(sizes, seed_streams(seed, len(sizes))))

