"""
Counter-based random streams
============================
Every Monte Carlo estimate is a function of (seed, n, workers) only. Each
worker draws from its own Philox4x64 stream keyed by (seed, worker index),
so a worker's samples do not depend on how many other workers run or in
which order they finish.

Defaults come from the environment:
  POLYKIN_SEED     base seed when none is passed
  POLYKIN_WORKERS  number of substreams / threads
  POLYKIN_BATCH    samples generated per vectorised batch
"""

import os

import numpy as np


DEFAULT_SEED    = int(os.getenv("POLYKIN_SEED", "20240607"))
DEFAULT_WORKERS = int(os.getenv("POLYKIN_WORKERS", "1"))
DEFAULT_BATCH   = int(os.getenv("POLYKIN_BATCH", "65536"))

_MASK64 = (1 << 64) - 1


def substream(seed: int, worker: int) -> np.random.Generator:
    """Generator for worker `worker` of the stream family `seed`."""
    if worker < 0:
        raise ValueError(f"worker index must be >= 0, got {worker}")
    key = np.array([seed & _MASK64, worker & _MASK64], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def partition(n: int, workers: int) -> list[int]:
    """Split n samples over workers; the first n % workers get one extra."""
    if workers < 1:
        raise ValueError(f"workers must be >= 1, got {workers}")
    base, extra = divmod(n, workers)
    return [base + (1 if i < extra else 0) for i in range(workers)]


def batches(n: int, batch: int = None) -> list[int]:
    batch = batch or DEFAULT_BATCH
    sizes = [batch] * (n // batch)
    if n % batch:
        sizes.append(n % batch)
    return sizes
