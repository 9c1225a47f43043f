"""
Seed handling.

Every stochastic routine takes an explicit seed.  Independent streams are
derived by mixing a chunk/replicate index into the seed entropy, so results
do not depend on how work is split across threads:

    stream(seed, i) == np.random.SeedSequence([seed, i])
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np


def rng_for(seed):
    """A Generator from an int seed, a SeedSequence, or an existing Generator."""
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, np.random.SeedSequence):
        return np.random.default_rng(seed)
    if seed is None:
        raise ValueError("an explicit seed is required")
    return np.random.default_rng(np.random.SeedSequence(_entropy(seed)))


def _entropy(seed):
    if isinstance(seed, (tuple, list)):
        return [int(s) for s in seed]
    return int(seed)


def stream(seed, *index):
    """Seed for sub-stream ``index`` of ``seed`` (an int tuple, usable as a seed)."""
    base = _entropy(seed)
    base = list(base) if isinstance(base, list) else [base]
    return tuple(base + [int(i) for i in index])


def thread_count():
    """Worker cap from PERMUTON_LAB_THREADS (default 1)."""
    try:
        return max(1, int(os.environ.get("PERMUTON_LAB_THREADS", "1")))
    except ValueError:
        return 1


def parallel_map(fn, items, workers=None):
    """``list(map(fn, items))`` on up to ``workers`` threads; order is preserved."""
    items = list(items)
    workers = thread_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(fn, items))
