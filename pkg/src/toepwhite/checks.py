"""Identity checks run by ``toepwhite selftest``.

Each check returns a :class:`CheckResult`; nothing here raises on a failed
identity, so the caller can report every line.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .estimators import (
    EstimatorKind,
    estimate_lags_direct,
    estimate_lags_fft,
    hadamard_trace_identity,
    oracle_biased_symbol,
    oracle_unbiased_symbol,
)
from .model import derive_seed, sample_complex_gaussian_matrix
from .toeplitz import CovarianceSequence, symbol_eval, unbias_weights


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    worst: float
    tol: float

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.name}: worst={self.worst:.3e} tol={self.tol:.0e}"


SELFTEST_SEED = 20140101


def _instances(n: int, seed: int):
    sizes = list(itertools.product((4, 8, 16), (8, 16, 32)))
    for i in range(n):
        N, T = sizes[i % len(sizes)]
        yield sample_complex_gaussian_matrix(derive_seed(seed, i), N, T)


def symbol_identities(n_instances: int = 50, n_angles: int = 8, seed: int = SELFTEST_SEED):
    """Quadratic-form vs lag-sum evaluation of both estimated symbols."""
    rng = np.random.default_rng(seed)
    worst_b = worst_u = 0.0
    for Y in _instances(n_instances, seed):
        lams = rng.uniform(0, 2 * np.pi, n_angles)
        for kind in EstimatorKind:
            seq = CovarianceSequence(estimate_lags_direct(Y, kind).lags)
            # the Fourier-vector quadratic form evaluates the lag sum at -lam
            lag_side = symbol_eval(seq, -lams)
            quad = [(oracle_biased_symbol if kind is EstimatorKind.BIASED else oracle_unbiased_symbol)(Y, l) for l in lams]
            scale = np.abs(seq.half_lags).sum() * 2
            err = float(np.max(np.abs(np.array(quad) - lag_side)) / scale)
            if kind is EstimatorKind.BIASED:
                worst_b = max(worst_b, err)
            else:
                worst_u = max(worst_u, err)
    return [
        CheckResult("biased symbol quadratic-form identity", worst_b <= 1e-10, worst_b, 1e-10),
        CheckResult("unbiased symbol Hadamard quadratic-form identity", worst_u <= 1e-10, worst_u, 1e-10),
    ]


def hadamard_identity(n_instances: int = 50, seed: int = SELFTEST_SEED) -> CheckResult:
    rng = np.random.default_rng(seed + 1)
    worst = 0.0
    for _ in range(n_instances):
        m = int(rng.integers(2, 17))
        c = lambda *s: rng.standard_normal(s) + 1j * rng.standard_normal(s)
        x, y, A, B = c(m), c(m), c(m, m), c(m, m)
        left, right = hadamard_trace_identity(x, y, A, B)
        scale = np.linalg.norm(x) * np.linalg.norm(y) * np.abs(A).max() * np.abs(B).max() * m
        worst = max(worst, abs(left - right) / scale)
    return CheckResult("Hadamard trace identity", worst <= 1e-12, worst, 1e-12)


def fft_vs_direct(n_instances: int = 100, seed: int = SELFTEST_SEED) -> CheckResult:
    worst = 0.0
    for Y in _instances(n_instances, seed + 2):
        for kind in EstimatorKind:
            d = estimate_lags_direct(Y, kind).lags
            f = estimate_lags_fft(Y, kind).lags
            worst = max(worst, float(np.abs(d - f).max() / np.abs(d).max()))
    return CheckResult("FFT lags match direct sums", worst <= 1e-10, worst, 1e-10)


def harmonic_trace_exact(T: int) -> Fraction:
    """``T + 2 T^2 H_{T-1}`` in exact arithmetic."""
    return T + 2 * T * T * sum((Fraction(1, m) for m in range(1, T)), Fraction(0))


def weight_trace_exact(T: int) -> Fraction:
    """``tr(B^2)`` summed entrywise over rationals."""
    return sum((Fraction(T, T - abs(i - j)) ** 2 for i in range(T) for j in range(T)), Fraction(0))


def weight_trace_identity(T_max: int = 64) -> list:
    exact_ok = True
    worst = 0.0
    for T in range(1, T_max + 1):
        target = harmonic_trace_exact(T)
        exact_ok &= weight_trace_exact(T) == target
        B = unbias_weights(T)
        worst = max(worst, abs(float(np.trace(B @ B)) - float(target)) / float(target))
    return [
        CheckResult("tr(B^2) harmonic identity (rational)", exact_ok, 0.0 if exact_ok else 1.0, 0.0),
        CheckResult("tr(B^2) harmonic identity (float)", worst <= 1e-9, worst, 1e-9),
    ]


def run_selftest() -> list:
    results = symbol_identities()
    results.append(hadamard_identity())
    results.append(fft_vs_direct())
    results += weight_trace_identity()
    return results
