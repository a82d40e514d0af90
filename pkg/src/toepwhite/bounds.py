"""Leading-order exponents of the spectral-norm concentration bounds.

Both bounds read ``P[||R_hat - R|| > x] <= exp(-T * E)`` to leading order;
the ``o(1)`` corrections are not modelled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .toeplitz import CovarianceSequence


@dataclass(frozen=True)
class BoundQuery:
    x: float
    c: float
    sup_norm: float
    T: int = 2

    def __post_init__(self):
        if self.x <= 0 or self.c <= 0 or self.sup_norm <= 0:
            raise ValueError("x, c and sup_norm must be positive")
        if self.T < 2:
            raise ValueError("T must be >= 2")


def biased_exponent(q: BoundQuery) -> float:
    """``c (u - log(1 + u))`` with ``u = x / ||symbol||_inf``."""
    u = q.x / q.sup_norm
    return q.c * (u - math.log1p(u))


def unbiased_exponent(q: BoundQuery) -> float:
    """``c x^2 / (4 ||symbol||_inf^2 log T)``."""
    return q.c * q.x**2 / (4.0 * q.sup_norm**2 * math.log(q.T))


def bias_remainder(seq: CovarianceSequence, T: int | None = None) -> float:
    """Deterministic bias ``sum_{|k|<T} |k r_k| / T`` of the biased symbol."""
    T = seq.T if T is None else T
    if T < 1:
        raise ValueError("T must be >= 1")
    r = seq.half_lags[:T]
    k = np.arange(r.size)
    return float(2.0 * np.sum(k * np.abs(r)) / T)


def mp_threshold(c: float) -> float:
    """Right edge ``(1 + sqrt(c))^2`` of the Marchenko-Pastur support."""
    if c <= 0:
        raise ValueError("aspect ratio must be positive")
    return (1.0 + math.sqrt(c)) ** 2
