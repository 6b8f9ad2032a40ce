"""Deterministic block-parallel execution of Monte-Carlo replications.

Replications are cut into fixed-size blocks whose size depends only on the
series length. Block ``k`` draws from its own stream ``make_rng(seed, *key, k)``
and results are reassembled in block order, so output is bit-identical for
any worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Union

import numpy as np

from .innovations import SeedSpec, make_rng

THREADS_ENV = "EXACTUR_THREADS"
_BLOCK_CELLS = 2_000_000
_MAX_BLOCK = 1000


def resolve_threads(threads: Union[int, str, None] = None) -> int:
    """Worker count from an int, ``"auto"``/None (env var, then CPU count)."""
    if threads in (None, "auto"):
        env = os.environ.get(THREADS_ENV)
        if env:
            return resolve_threads(int(env) if env != "auto" else os.cpu_count() or 1)
        return os.cpu_count() or 1
    threads = int(threads)
    if threads < 1:
        raise ValueError("threads must be a positive integer")
    return threads


def block_size(n: int) -> int:
    return max(1, min(_MAX_BLOCK, _BLOCK_CELLS // max(n, 1)))


def run_blocks(
    fn: Callable[[np.random.Generator, int], np.ndarray],
    reps: int,
    n: int,
    seed: SeedSpec,
    key: tuple = (),
    threads: Union[int, str, None] = 1,
) -> np.ndarray:
    """Call ``fn(rng, size)`` over blocks covering ``reps`` replications.

    ``fn`` returns an array whose first axis has length ``size``; the blocks
    are concatenated along that axis in block order.
    """
    bs = block_size(n)
    sizes = [bs] * (reps // bs) + ([reps % bs] if reps % bs else [])

    def task(k):
        return fn(make_rng(seed, *key, k), sizes[k])

    workers = resolve_threads(threads)
    if workers == 1 or len(sizes) == 1:
        parts = [task(k) for k in range(len(sizes))]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(task, range(len(sizes))))
    return np.concatenate(parts, axis=0) if parts else np.empty(0)
