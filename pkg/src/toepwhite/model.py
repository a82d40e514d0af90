"""Seeded generators for stationary noise, rank-one sources and observations.

Every sampler takes a seed (int, ``SeedSequence`` or ``Generator``) and is a
pure function of it. Noise and signal draw from separate streams so that
changing the signal seed never perturbs the noise block.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np

from .toeplitz import CovarianceSequence, build_toeplitz, hermitian_sqrt

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator]


class Hypothesis(enum.Enum):
    H0 = "H0"
    H1 = "H1"


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def derive_seed(master: int, *keys: int) -> np.random.SeedSequence:
    """Sub-seed for ``keys`` under ``master``; distinct keys give independent streams."""
    return np.random.SeedSequence(int(master), spawn_key=tuple(int(k) for k in keys))


def trial_streams(master: int, *keys: int):
    """(noise, signal, pure-noise) seeds for one Monte Carlo trial."""
    ss = derive_seed(master, *keys)
    return tuple(ss.spawn(3))


def ar1_sequence(a: float, T: int) -> CovarianceSequence:
    """Lags ``a**|k|`` of a unit-variance AR(1) process."""
    if not 0 <= a < 1:
        raise ValueError(f"AR(1) coefficient must lie in [0, 1), got {a}")
    if T < 1:
        raise ValueError("T must be >= 1")
    return CovarianceSequence(a ** np.arange(T, dtype=float))


def sample_complex_gaussian_matrix(seed: SeedLike, N: int, T: int) -> np.ndarray:
    """N x T matrix of i.i.d. CN(0, 1) entries (real and imaginary parts of variance 1/2)."""
    if N < 1 or T < 1:
        raise ValueError("N and T must be >= 1")
    g = as_generator(seed)
    z = g.standard_normal((N, T, 2))
    return (z[..., 0] + 1j * z[..., 1]) * np.sqrt(0.5)


@dataclass(frozen=True)
class NoiseModel:
    """Spatially white, temporally stationary Gaussian noise with covariance ``R``."""

    covariance: CovarianceSequence
    R: np.ndarray = field(init=False, repr=False, compare=False)
    factor: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        R = build_toeplitz(self.covariance)
        S = hermitian_sqrt(R)
        R.setflags(write=False)
        S.setflags(write=False)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "factor", S)

    @property
    def T(self) -> int:
        return self.covariance.T

    @classmethod
    def ar1(cls, a: float, T: int) -> "NoiseModel":
        return cls(ar1_sequence(a, T))


def steering_vector(N: int, theta_deg: float, p: float) -> np.ndarray:
    """Array response ``sqrt(p/N) * exp(2i pi (theta/360) n)``, ``n = 0..N-1``.

    ``theta_deg`` is the per-sensor phase step expressed in degrees of a
    full turn, so ``theta_deg = 90`` gives ``(1, i, -1, -i)`` up to scale.
    """
    if p < 0:
        raise ValueError("power must be nonnegative")
    if N < 1:
        raise ValueError("N must be >= 1")
    n = np.arange(N)
    return np.sqrt(p / N) * np.exp(2j * np.pi * (theta_deg / 360.0) * n)


@dataclass(frozen=True)
class SourceModel:
    """Single narrowband source ``h s^H Gamma^{1/2}``; ``gamma=None`` means identity."""

    N: int
    p: float = 1.0
    theta_deg: float = 10.0
    gamma: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.p < 0:
            raise ValueError("power must be nonnegative")
        if self.gamma is not None:
            object.__setattr__(self, "_gamma_sqrt", hermitian_sqrt(self.gamma))
        else:
            object.__setattr__(self, "_gamma_sqrt", None)

    @property
    def channel(self) -> np.ndarray:
        return steering_vector(self.N, self.theta_deg, self.p)

    @classmethod
    def from_snr_db(cls, N: int, snr_db: float, theta_deg: float = 10.0) -> "SourceModel":
        return cls(N=N, p=10.0 ** (snr_db / 10.0), theta_deg=theta_deg)


@dataclass(frozen=True)
class ObservationMatrix:
    data: np.ndarray
    hypothesis: Optional[Hypothesis] = None
    seed: Optional[tuple] = None

    @property
    def shape(self):
        return self.data.shape

    @property
    def N(self) -> int:
        return self.data.shape[0]

    @property
    def T(self) -> int:
        return self.data.shape[1]


def _seed_tag(seed):
    if isinstance(seed, np.random.SeedSequence):
        return (seed.entropy, *seed.spawn_key)
    if isinstance(seed, (int, np.integer)):
        return (int(seed),)
    return None


def sample_noise(seed: SeedLike, model: NoiseModel, N: int, T: int) -> ObservationMatrix:
    """Noise block ``V = W R^{1/2}`` under H0."""
    if model.T != T:
        raise ValueError(f"noise model has dimension {model.T}, requested T={T}")
    W = sample_complex_gaussian_matrix(seed, N, T)
    return ObservationMatrix(W @ model.factor, Hypothesis.H0, _seed_tag(seed))


def sample_signal_vector(seed: SeedLike, T: int) -> np.ndarray:
    """The CN(0, I_T) source sequence ``s``."""
    return sample_complex_gaussian_matrix(seed, 1, T)[0]


def sample_signal(seed: SeedLike, source: SourceModel, T: int) -> np.ndarray:
    """Rank-one source block ``P = h s^H Gamma^{1/2}``."""
    if source.gamma is not None and np.shape(source.gamma) != (T, T):
        raise ValueError("signal covariance must be T x T")
    s = sample_signal_vector(seed, T)
    row = np.conj(s)
    if source._gamma_sqrt is not None:
        row = row @ source._gamma_sqrt
    return np.outer(source.channel, row)


def observe(
    hypothesis: Hypothesis,
    noise_seed: SeedLike,
    signal_seed: SeedLike,
    noise_model: NoiseModel,
    source: SourceModel,
    N: int,
    T: int,
) -> ObservationMatrix:
    """Observation under H0 (``V``) or H1 (``h s^H + V``)."""
    hypothesis = Hypothesis(hypothesis)
    if source.N != N:
        raise ValueError(f"source has {source.N} sensors, requested N={N}")
    V = sample_noise(noise_seed, noise_model, N, T)
    if hypothesis is Hypothesis.H0:
        return V
    P = sample_signal(signal_seed, source, T)
    tag = (V.seed, _seed_tag(signal_seed))
    return ObservationMatrix(V.data + P, Hypothesis.H1, tag)
