"""Biased and unbiased correlogram estimators of a Toeplitz covariance.

Two routes to the same lag sums: a direct O(N T^2) double sum and a
zero-padded FFT autocorrelation. The quadratic-form identities at the end
give a third, matrix-level evaluation of the estimated symbol and are used
as independent checks.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .toeplitz import CovarianceSequence, fourier_vector, toeplitz_from_lags, unbias_weights


class EstimatorKind(enum.Enum):
    BIASED = "biased"
    UNBIASED = "unbiased"


@dataclass(frozen=True)
class AutocovarianceEstimate:
    lags: np.ndarray
    kind: EstimatorKind
    N: int
    T: int

    def sequence(self) -> CovarianceSequence:
        return CovarianceSequence(self.lags)

    def matrix(self) -> np.ndarray:
        return toeplitz_from_lags(self.lags)


def _as_array(Y) -> np.ndarray:
    data = getattr(Y, "data", Y)
    data = np.asarray(data, dtype=complex)
    if data.ndim < 2 or data.shape[-1] == 0 or data.shape[-2] == 0:
        raise ValueError(f"observation must be a non-empty N x T block, got shape {data.shape}")
    return data


def lag_sums_direct(Y) -> np.ndarray:
    """``sum_{n,t} y[n, t+k] conj(y[n, t])`` for ``k = 0..T-1`` by explicit sums."""
    Y = _as_array(Y)
    T = Y.shape[-1]
    out = np.empty(Y.shape[:-2] + (T,), dtype=complex)
    for k in range(T):
        prod = Y[..., k:] * np.conj(Y[..., : T - k])
        out[..., k] = prod.sum(axis=(-2, -1))
    return out


def lag_sums_fft(Y) -> np.ndarray:
    """Same sums as :func:`lag_sums_direct` from a length ``>= 2T`` power-of-two FFT.

    Works on stacked blocks ``(..., N, T)``.
    """
    Y = _as_array(Y)
    T = Y.shape[-1]
    L = 1 << int(np.ceil(np.log2(2 * T)))
    F = np.fft.fft(Y, n=L, axis=-1)
    power = (F.real**2 + F.imag**2).sum(axis=-2)
    return np.fft.ifft(power, axis=-1)[..., :T]


def normalize_lags(sums: np.ndarray, N: int, T: int, kind: EstimatorKind) -> np.ndarray:
    kind = EstimatorKind(kind)
    if kind is EstimatorKind.BIASED:
        r = sums / (N * T)
    else:
        r = sums / (N * (T - np.arange(T)))
    r = np.array(r, dtype=complex)
    r[..., 0] = r[..., 0].real
    return r


def _estimate(Y, kind, sums_fn) -> AutocovarianceEstimate:
    data = _as_array(Y)
    if data.ndim != 2:
        raise ValueError("expected a single N x T block")
    N, T = data.shape
    kind = EstimatorKind(kind)
    return AutocovarianceEstimate(normalize_lags(sums_fn(data), N, T, kind), kind, N, T)


def estimate_lags_direct(Y, kind=EstimatorKind.BIASED) -> AutocovarianceEstimate:
    """Correlogram lags by the defining double sum."""
    return _estimate(Y, kind, lag_sums_direct)


def estimate_lags_fft(Y, kind=EstimatorKind.BIASED) -> AutocovarianceEstimate:
    """Correlogram lags through the FFT fast path."""
    return _estimate(Y, kind, lag_sums_fft)


def estimate_covariance(Y, kind=EstimatorKind.BIASED) -> np.ndarray:
    """Toeplitz assembly of the estimated lags (PSD when ``kind`` is biased)."""
    est = estimate_lags_fft(Y, kind)
    M = est.matrix()
    H = (M + M.conj().T) / 2
    scale = max(np.abs(M).max(), 1e-300)
    if np.abs(H - M).max() > 1e-12 * scale:
        raise RuntimeError("assembled estimate is not Hermitian")
    return H


def estimate_covariance_batch(Y: np.ndarray, kind=EstimatorKind.BIASED) -> np.ndarray:
    """Stacked version of :func:`estimate_covariance` for ``(B, N, T)`` input."""
    Y = _as_array(Y)
    N, T = Y.shape[-2:]
    r = normalize_lags(lag_sums_fft(Y), N, T, kind)
    return toeplitz_from_lags(r)


def _gram(Y) -> np.ndarray:
    Y = _as_array(Y)
    return Y.conj().T @ Y / Y.shape[0]


def oracle_biased_symbol(Y, lam: float) -> float:
    """Quadratic form ``d(lam)^H (Y^H Y / N) d(lam)`` with the unit Fourier vector.

    Equals ``sum_k rb_k exp(-i k lam)``: the biased symbol at ``-lam``.
    """
    G = _gram(Y)
    d = fourier_vector(G.shape[0], lam)
    return float(np.vdot(d, G @ d).real)


def oracle_unbiased_symbol(Y, lam: float, weights: np.ndarray | None = None) -> float:
    """Quadratic form ``d^H ((Y^H Y / N) * B) d`` with the unbiasing weights ``B``."""
    G = _gram(Y)
    B = unbias_weights(G.shape[0]) if weights is None else weights
    d = fourier_vector(G.shape[0], lam)
    return float(np.vdot(d, (G * B) @ d).real)


def hadamard_trace_identity(x, y, A, B):
    """Both sides of ``x^H (A o B) y = tr(D_x^H A D_y B^T)``."""
    x = np.asarray(x)
    y = np.asarray(y)
    A = np.asarray(A)
    B = np.asarray(B)
    m = x.shape[0]
    if y.shape != (m,) or A.shape != (m, m) or B.shape != (m, m):
        raise ValueError("dimension mismatch")
    left = np.vdot(x, (A * B) @ y)
    right = np.trace(np.diag(x).conj().T @ A @ np.diag(y) @ B.T)
    return complex(left), complex(right)
