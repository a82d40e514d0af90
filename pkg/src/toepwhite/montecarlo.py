"""Block runner for seeded Monte Carlo trials.

Trials are cut into fixed-size blocks whose boundaries do not depend on the
worker count, and every trial draws from its own derived seed, so the merged
result is bit-identical for any ``workers`` value.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List

BLOCK_SIZE = 250

# experiment ids used in seed derivation
EXP_CALIBRATE = 0
EXP_CONCENTRATION = 1
EXP_DETECTION = 2
EXP_POWER = 3

# trial phases inside a detection point
PHASE_CALIBRATION = 0
PHASE_H1 = 1
PHASE_H0 = 2


def blocks(n_trials: int, block_size: int = BLOCK_SIZE):
    return [(s, min(s + block_size, n_trials)) for s in range(0, n_trials, block_size)]


def run_blocks(fn: Callable, n_trials: int, workers: int = 1, block_size: int = BLOCK_SIZE, **kwargs) -> List:
    """Evaluate ``fn(start, stop, **kwargs)`` over all blocks, results in block order."""
    spans = blocks(n_trials, block_size)
    if workers is None or workers <= 0:
        workers = os.cpu_count() or 1
    if workers == 1 or len(spans) <= 1:
        return [fn(s, e, **kwargs) for s, e in spans]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        futures = [ex.submit(fn, s, e, **kwargs) for s, e in spans]
        return [f.result() for f in futures]
