"""Online GLRT source detection with estimated-noise whitening.

The noise covariance is estimated from the observation itself (or taken from
a side channel for the comparison modes), the observation is whitened, and
the statistic ``alpha = N ||Y R^-1 Y^H|| / tr(Y R^-1 Y^H)`` is compared with a
threshold.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Dict, Iterable, Optional

import numpy as np

from . import montecarlo
from .estimators import EstimatorKind, estimate_covariance, estimate_covariance_batch
from .model import (
    Hypothesis,
    NoiseModel,
    sample_complex_gaussian_matrix,
    sample_signal_vector,
    steering_vector,
    trial_streams,
)
from .toeplitz import floored_inverse, regularized_hermitian_inverse, regularized_inverse_sqrt

DEFAULT_FLOOR = 1e-8


class Mode(enum.Enum):
    BIASED = "biased"
    UNBIASED = "unbiased"
    ORACLE = "oracle"
    WHITE = "white"
    BIASED_PN = "biased-pn"
    UNBIASED_PN = "unbiased-pn"

    @property
    def needs_noise_block(self) -> bool:
        return self in (Mode.BIASED_PN, Mode.UNBIASED_PN)

    @property
    def kind(self) -> Optional[EstimatorKind]:
        if self in (Mode.BIASED, Mode.BIASED_PN):
            return EstimatorKind.BIASED
        if self in (Mode.UNBIASED, Mode.UNBIASED_PN):
            return EstimatorKind.UNBIASED
        return None


@dataclass(frozen=True)
class DetectionConfig:
    """Estimator mode plus either a fixed threshold or a target false-alarm rate."""

    estimator: Mode = Mode.BIASED
    gamma: Optional[float] = None
    far: Optional[float] = None
    calib_trials: int = 10_000
    calib_seed: int = 0
    floor_ratio: float = DEFAULT_FLOOR

    def __post_init__(self):
        object.__setattr__(self, "estimator", Mode(self.estimator))
        if (self.gamma is None) == (self.far is None):
            raise ValueError("give exactly one of gamma (fixed) or far (calibrated)")
        if self.gamma is not None and not self.gamma > 0:
            raise ValueError("gamma must be positive")
        if self.far is not None and not 0 < self.far < 1:
            raise ValueError("far must lie in (0, 1)")


@dataclass(frozen=True)
class DetectionResult:
    alpha: float
    gamma: float
    decision: Hypothesis
    whitening_flag: bool
    estimator: Mode


def _data(Y) -> np.ndarray:
    return np.asarray(getattr(Y, "data", Y), dtype=complex)


def glrt_statistic(Y, R_hat: np.ndarray, floor_ratio: float = DEFAULT_FLOOR) -> float:
    """GLRT statistic of ``Y`` whitened by ``R_hat``; lies in ``[1, N]``."""
    Y = _data(Y)
    if Y.ndim != 2:
        raise ValueError("expected an N x T block")
    if not np.any(Y):
        raise ValueError("statistic undefined for a zero observation")
    Rinv, _ = regularized_hermitian_inverse(R_hat, floor_ratio)
    return float(glrt_statistics(Y[None], Rinv)[0])


def glrt_statistics(Y: np.ndarray, R_inv: np.ndarray) -> np.ndarray:
    """Batched statistic for ``Y`` of shape ``(B, N, T)`` and matching inverses."""
    G = Y @ R_inv @ np.conj(np.swapaxes(Y, -1, -2))
    G = (G + np.conj(np.swapaxes(G, -1, -2))) / 2
    ev = np.linalg.eigvalsh(G)
    tr = ev.sum(axis=-1)
    if np.any(tr <= 0):
        raise ValueError("statistic undefined: nonpositive trace")
    return Y.shape[-2] * np.abs(ev).max(axis=-1) / tr


def whiten(Y, R_hat: np.ndarray, floor_ratio: float = DEFAULT_FLOOR) -> np.ndarray:
    """``Y R_hat^{-1/2}`` with the Hermitian inverse square root."""
    S, _ = regularized_inverse_sqrt(R_hat, floor_ratio)
    return _data(Y) @ S


def decide(alpha: float, gamma: float) -> Hypothesis:
    if not (np.isfinite(alpha) and np.isfinite(gamma)):
        raise ValueError("alpha and gamma must be finite")
    return Hypothesis.H1 if alpha >= gamma else Hypothesis.H0


def estimate_for_mode(Y, mode: Mode, noise_model: Optional[NoiseModel] = None, noise_block=None) -> np.ndarray:
    """Covariance used for whitening under a given comparison mode."""
    mode = Mode(mode)
    Y = _data(Y)
    T = Y.shape[-1]
    if mode is Mode.WHITE:
        return np.eye(T, dtype=complex)
    if mode is Mode.ORACLE:
        if noise_model is None:
            raise ValueError("oracle mode needs the noise model")
        return noise_model.R
    if mode.needs_noise_block:
        if noise_block is None:
            raise ValueError(f"{mode.value} mode needs a pure-noise block")
        nb = _data(noise_block)
        if nb.shape != Y.shape:
            raise ValueError("pure-noise block must match the observation shape")
        return estimate_covariance(nb, mode.kind)
    return estimate_covariance(Y, mode.kind)


def _inverse_for_mode_batch(Y, mode, noise_model, noise_block, floor_ratio):
    B, N, T = Y.shape
    if mode is Mode.WHITE:
        return np.eye(T, dtype=complex), np.zeros(B, bool)
    if mode is Mode.ORACLE:
        inv, flag = floored_inverse(noise_model.R, floor_ratio)
        return inv, np.full(B, bool(flag))
    src = noise_block if mode.needs_noise_block else Y
    return floored_inverse(estimate_covariance_batch(src, mode.kind), floor_ratio)


def simulate_alpha_block(
    start: int,
    stop: int,
    *,
    noise_model: NoiseModel,
    N: int,
    p: float,
    modes: Iterable[Mode],
    master_seed: int,
    keys: tuple,
    hypothesis: Hypothesis,
    theta_deg: float = 10.0,
    floor_ratio: float = DEFAULT_FLOOR,
) -> Dict[Mode, np.ndarray]:
    """Statistics for trials ``start..stop-1``; every mode sees the same draws."""
    modes = [Mode(m) for m in modes]
    T = noise_model.T
    n = stop - start
    W = np.empty((n, N, T), complex)
    s = np.empty((n, T), complex)
    need_pn = any(m.needs_noise_block for m in modes)
    Wp = np.empty((n, N, T), complex) if need_pn else None
    for j, i in enumerate(range(start, stop)):
        ns, ss, ps = trial_streams(master_seed, *keys, i)
        W[j] = sample_complex_gaussian_matrix(ns, N, T)
        s[j] = sample_signal_vector(ss, T)
        if need_pn:
            Wp[j] = sample_complex_gaussian_matrix(ps, N, T)
    Y = W @ noise_model.factor
    if Hypothesis(hypothesis) is Hypothesis.H1:
        h = steering_vector(N, theta_deg, p)
        Y = Y + h[None, :, None] * np.conj(s)[:, None, :]
    V_pn = Wp @ noise_model.factor if need_pn else None
    out = {}
    for m in modes:
        inv, _ = _inverse_for_mode_batch(Y, m, noise_model, V_pn, floor_ratio)
        out[m] = glrt_statistics(Y, inv)
    return out


def simulate_alphas(n_trials: int, workers: int = 1, **kwargs) -> Dict[Mode, np.ndarray]:
    parts = montecarlo.run_blocks(simulate_alpha_block, n_trials, workers=workers, **kwargs)
    modes = [Mode(m) for m in kwargs["modes"]]
    return {m: np.concatenate([part[m] for part in parts]) for m in modes}


def quantile_threshold(alphas: np.ndarray, rate: float) -> float:
    """Empirical ``1 - rate`` quantile of null statistics."""
    if not 0 < rate < 1:
        raise ValueError("rate must lie in (0, 1)")
    n = len(alphas)
    if n * rate < 20:
        raise ValueError(f"{n} trials cannot resolve a {rate} tail (need trials * rate >= 20)")
    return float(np.quantile(alphas, 1.0 - rate))


def calibrate_threshold(
    mode: Mode,
    noise_model: NoiseModel,
    N: int,
    trials: int,
    seed: int,
    rate: float = 0.05,
    floor_ratio: float = DEFAULT_FLOOR,
    workers: int = 1,
    keys: tuple = (montecarlo.EXP_CALIBRATE, 0, montecarlo.PHASE_CALIBRATION),
) -> float:
    """Threshold whose false-alarm rate under H0 is ``rate``, from ``trials`` simulations.

    The whole pipeline (estimation included) runs on each null trial.
    """
    if trials < 1000:
        raise ValueError("calibration needs at least 1000 trials")
    if not 0 < rate < 1:
        raise ValueError("rate must lie in (0, 1)")
    if trials * rate < 20:
        raise ValueError(f"{trials} trials cannot resolve a {rate} tail (need trials * rate >= 20)")
    mode = Mode(mode)
    alphas = simulate_alphas(
        trials,
        workers=workers,
        noise_model=noise_model,
        N=N,
        p=0.0,
        modes=[mode],
        master_seed=seed,
        keys=keys,
        hypothesis=Hypothesis.H0,
        floor_ratio=floor_ratio,
    )[mode]
    return quantile_threshold(alphas, rate)


def detect(
    Y,
    config: DetectionConfig,
    noise_model: Optional[NoiseModel] = None,
    noise_block=None,
    workers: int = 1,
) -> DetectionResult:
    """Run the full pipeline on one observation."""
    data = _data(Y)
    N, T = data.shape
    mode = config.estimator
    R_hat = estimate_for_mode(data, mode, noise_model, noise_block)
    _, flag = regularized_hermitian_inverse(R_hat, config.floor_ratio)
    alpha = glrt_statistic(data, R_hat, config.floor_ratio)
    gamma = config.gamma
    if gamma is None:
        if noise_model is None:
            raise ValueError("threshold calibration needs a noise model")
        gamma = calibrate_threshold(
            mode, noise_model, N, config.calib_trials, config.calib_seed, config.far,
            config.floor_ratio, workers,
        )
    return DetectionResult(alpha, gamma, decide(alpha, gamma), flag, mode)
