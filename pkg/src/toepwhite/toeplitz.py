"""Dense Hermitian Toeplitz kernel.

Lag sequences, their Toeplitz realisations, the spectral symbol, Hermitian
square roots / floored inverses and the Fourier and unbiasing weight
matrices used by the estimators and the detector.

All functions are pure; arrays are returned fresh and never cached in
module state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

PSD_TOL = 1e-10
HERMITIAN_TOL = 1e-10


class NotPositiveSemidefinite(ValueError):
    """Raised when a matrix has an eigenvalue below the PSD tolerance."""


@dataclass(frozen=True)
class CovarianceSequence:
    """Lags ``r_0 .. r_{T-1}`` of a stationary covariance function.

    Negative lags are implied by ``r_{-k} = conj(r_k)``.
    """

    half_lags: np.ndarray

    def __post_init__(self):
        r = np.array(self.half_lags, dtype=complex).reshape(-1)
        if r.size < 1:
            raise ValueError("covariance sequence needs at least one lag")
        if not np.all(np.isfinite(r)):
            raise ValueError("covariance lags must be finite")
        scale = max(1.0, float(np.abs(r).max()))
        if abs(r[0].imag) > 1e-12 * scale:
            raise ValueError(f"r_0 must be real, got {r[0]}")
        if r[0].real < 0:
            raise ValueError(f"r_0 must be nonnegative, got {r[0].real}")
        r[0] = r[0].real
        r.setflags(write=False)
        object.__setattr__(self, "half_lags", r)

    @property
    def T(self) -> int:
        return self.half_lags.size

    def full_lags(self) -> np.ndarray:
        """Lags ordered ``r_{-(T-1)}, ..., r_0, ..., r_{T-1}``."""
        r = self.half_lags
        return np.concatenate([np.conj(r[:0:-1]), r])


def toeplitz_from_lags(r: np.ndarray) -> np.ndarray:
    """Hermitian Toeplitz matrices ``[r_{i-j}]`` from half lags.

    ``r`` may carry leading batch dimensions; the last axis holds
    ``r_0 .. r_{T-1}``.
    """
    r = np.asarray(r)
    T = r.shape[-1]
    idx = np.arange(T)
    k = idx[:, None] - idx[None, :]
    out = r[..., np.abs(k)]
    upper = k < 0
    out = np.where(upper, np.conj(out), out)
    return out


def build_toeplitz(seq: CovarianceSequence) -> np.ndarray:
    """T x T matrix with entry ``(i, j) = r_{i-j}``."""
    return toeplitz_from_lags(seq.half_lags)


def symbol_eval(seq: CovarianceSequence, lam) -> np.ndarray | float:
    """Evaluate ``sum_{|k|<T} r_k exp(i k lam)``.

    Accepts a scalar or an array of angles. Raises ``ValueError`` when the
    imaginary residual exceeds ``1e-12 * sum |r_k|``, which can only happen
    for a corrupted sequence.
    """
    lam_arr = np.asarray(lam, dtype=float)
    if not np.all(np.isfinite(lam_arr)):
        raise ValueError("angle must be finite")
    full = seq.full_lags()
    T = seq.T
    k = np.arange(-(T - 1), T)
    vals = np.exp(1j * np.multiply.outer(lam_arr, k)) @ full
    scale = np.abs(full).sum()
    if np.any(np.abs(vals.imag) > 1e-12 * scale):
        raise ValueError("symbol has a non-negligible imaginary part; lags are not Hermitian")
    out = vals.real
    return float(out) if out.ndim == 0 else out


def symbol_grid(seq: CovarianceSequence, grid_size: int) -> np.ndarray:
    """Symbol on the uniform grid ``2 pi j / grid_size`` via one FFT."""
    T = seq.T
    if grid_size < 2 * T - 1:
        raise ValueError("grid_size must be at least 2T-1")
    c = np.zeros(grid_size, dtype=complex)
    r = seq.half_lags
    c[:T] = r
    c[grid_size - T + 1:] += np.conj(r[:0:-1])
    return (np.fft.ifft(c) * grid_size).real


def symbol_sup_norm(seq: CovarianceSequence, grid_size: Optional[int] = None) -> float:
    """Max of ``|symbol|`` over a uniform grid of ``max(4T, 4096)`` points by default."""
    T = seq.T
    if grid_size is None:
        grid_size = max(4 * T, 4096)
    if grid_size < 4 * T:
        raise ValueError(f"grid_size must be >= 4T = {4 * T}")
    return float(np.abs(symbol_grid(seq, grid_size)).max())


def _check_hermitian(M: np.ndarray) -> np.ndarray:
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {M.shape}")
    scale = max(np.abs(M).max(initial=0.0), 1e-300)
    if np.abs(M - M.conj().T).max(initial=0.0) > HERMITIAN_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    return (M + M.conj().T) / 2


def hermitian_sqrt(M: np.ndarray, psd_tol: float = PSD_TOL) -> np.ndarray:
    """Unique Hermitian PSD square root of ``M``.

    Eigenvalues in ``[-psd_tol * max(1, lambda_max), 0)`` are clamped to zero;
    anything more negative raises :class:`NotPositiveSemidefinite`.
    """
    H = _check_hermitian(M)
    w, U = np.linalg.eigh(H)
    lim = psd_tol * max(1.0, float(w.max()))
    if w.min() < -lim:
        raise NotPositiveSemidefinite(f"min eigenvalue {w.min():.3e} below -{lim:.1e}")
    w = np.clip(w, 0.0, None)
    S = (U * np.sqrt(w)) @ U.conj().T
    return (S + S.conj().T) / 2


def spectral_norm(M: np.ndarray) -> float:
    """Largest absolute eigenvalue of a Hermitian matrix."""
    H = _check_hermitian(M)
    if H.size == 0:
        return 0.0
    return float(np.abs(np.linalg.eigvalsh(H)).max())


def power_iteration_norm(
    M: np.ndarray | Callable[[np.ndarray], np.ndarray],
    dim: Optional[int] = None,
    tol: float = 1e-13,
    max_iter: int = 20000,
    seed: int = 0,
) -> float:
    """Spectral norm of a Hermitian operator by power iteration on ``M^2``.

    ``M`` may be a matrix or a matvec callable (then ``dim`` is required).
    Iterating on the square keeps convergence monotone when ``+l`` and ``-l``
    are both extreme eigenvalues.
    """
    if callable(M):
        if dim is None:
            raise ValueError("dim is required for a matvec callable")
        matvec = M
    else:
        A = np.asarray(M)
        dim = A.shape[0]
        matvec = A.__matmul__
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(max_iter):
        y = matvec(matvec(x))
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        new = float(np.vdot(x, y).real)
        x = y / ny
        if abs(new - est) <= tol * max(new, 1e-300):
            est = new
            break
        est = new
    return float(np.sqrt(max(est, 0.0)))


def toeplitz_matvec(seq: CovarianceSequence, x: np.ndarray) -> np.ndarray:
    """``build_toeplitz(seq) @ x`` via circulant embedding (O(T log T))."""
    T = seq.T
    L = 1 << int(np.ceil(np.log2(max(2 * T, 2))))
    c = np.zeros(L, dtype=complex)
    r = seq.half_lags
    # first column of the matrix is r_0..r_{T-1}; first row is conj(r)
    c[:T] = r
    c[L - T + 1:] = np.conj(r[:0:-1])
    xp = np.zeros(L, dtype=complex)
    xp[:T] = x
    return np.fft.ifft(np.fft.fft(c) * np.fft.fft(xp))[:T]


def floored_inverse(M: np.ndarray, floor_ratio: float = 1e-8):
    """Batched eigen-floored inverse of Hermitian matrices.

    Returns ``(inverse, floored)`` where ``floored`` is a boolean array over
    the batch dimensions.
    """
    M = np.asarray(M)
    H = (M + np.conj(np.swapaxes(M, -1, -2))) / 2
    w, U = np.linalg.eigh(H)
    top = w[..., -1:]
    if np.any(top <= 0):
        raise ValueError("matrix has no positive eigenvalue; cannot regularise its inverse")
    floor = floor_ratio * top
    flagged = np.any(w < floor, axis=-1)
    w = np.maximum(w, floor)
    inv = (U / w[..., None, :]) @ np.conj(np.swapaxes(U, -1, -2))
    return inv, flagged


def regularized_hermitian_inverse(M: np.ndarray, floor_ratio: float = 1e-8):
    """Inverse of a Hermitian matrix with eigenvalues floored at ``floor_ratio * lambda_max``.

    Returns ``(inverse, flag)``; ``flag`` is True when any eigenvalue was raised.
    """
    if not 0 < floor_ratio <= 1e-3:
        raise ValueError("floor_ratio must lie in (0, 1e-3]")
    H = _check_hermitian(M)
    if not np.any(H):
        raise ValueError("cannot invert the zero matrix")
    inv, flag = floored_inverse(H, floor_ratio)
    return inv, bool(flag)


def regularized_inverse_sqrt(M: np.ndarray, floor_ratio: float = 1e-8):
    """Hermitian ``M^{-1/2}`` under the same flooring rule as the inverse."""
    if not 0 < floor_ratio <= 1e-3:
        raise ValueError("floor_ratio must lie in (0, 1e-3]")
    H = _check_hermitian(M)
    if not np.any(H):
        raise ValueError("cannot invert the zero matrix")
    w, U = np.linalg.eigh(H)
    if w[-1] <= 0:
        raise ValueError("matrix has no positive eigenvalue; cannot regularise its inverse")
    floor = floor_ratio * w[-1]
    flag = bool(np.any(w < floor))
    w = np.maximum(w, floor)
    S = (U / np.sqrt(w)) @ U.conj().T
    return (S + S.conj().T) / 2, flag


def fourier_vector(T: int, lam: float) -> np.ndarray:
    """Unit-norm vector with entries ``exp(-i lam t) / sqrt(T)``."""
    if T < 1:
        raise ValueError("T must be >= 1")
    t = np.arange(T)
    return np.exp(-1j * lam * t) / np.sqrt(T)


def unbias_weights(T: int) -> np.ndarray:
    """Weights ``T / (T - |i-j|)`` turning biased lag sums into unbiased ones."""
    if T < 1:
        raise ValueError("T must be >= 1")
    idx = np.arange(T)
    return T / (T - np.abs(idx[:, None] - idx[None, :])).astype(float)
