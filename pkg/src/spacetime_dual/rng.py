"""Reproducible shot-level randomness.

Every shot of a sampling probe gets its own counter-based stream derived from
(seed, shot index), so per-shot results are a pure function of the seed and
index.  Shots may therefore be evaluated in any order or on any number of
worker threads and still merge into byte-identical estimates: results are
written into a slot array by shot index and reduced in index order.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable

import numpy as np


def shot_stream(seed: int, index: int, lane: int = 0) -> np.random.Generator:
    """The stream for one shot: Philox keyed by a (seed, lane, index) derivation.

    ``lane`` separates independent shot pools drawn from the same seed (for
    example the numerator and denominator pools of a ratio estimator).
    """
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(lane, index))
    return np.random.Generator(np.random.Philox(ss))


def run_shots(shot_fn: Callable[[np.random.Generator], float], shots: int,
              seed: int, workers: int = 1, lane: int = 0) -> np.ndarray:
    """Evaluate `shot_fn` once per pre-split stream; output order is by index."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    values = np.empty(shots, dtype=float)

    def one(i: int) -> None:
        values[i] = shot_fn(shot_stream(seed, i, lane))

    if workers <= 1:
        for i in range(shots):
            one(i)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(one, range(shots)))
    return values
