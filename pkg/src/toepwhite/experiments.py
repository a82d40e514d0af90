"""Seeded Monte Carlo campaigns: concentration, detection error vs N, power vs SNR.

Each campaign returns a list of points and can be written to CSV with
:func:`write_csv`. Per-trial seeds are derived from
``(master seed, experiment id, point index, phase, trial index)`` so the
output does not depend on how trials are spread over workers.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from . import montecarlo
from .bounds import BoundQuery, biased_exponent, unbiased_exponent
from .detector import DEFAULT_FLOOR, Mode, quantile_threshold, simulate_alphas
from .estimators import EstimatorKind, lag_sums_fft, normalize_lags
from .model import Hypothesis, NoiseModel, sample_complex_gaussian_matrix, trial_streams
from .toeplitz import symbol_sup_norm, toeplitz_from_lags


class ExperimentKind(enum.Enum):
    CONCENTRATION = "concentration"
    DETECTION_VS_N = "detection-curve"
    POWER_VS_SNR = "power-curve"


@dataclass
class ExperimentConfig:
    kind: ExperimentKind
    sweep: Sequence[float]
    trials: int = 10_000
    seed: int = 0
    a: float = 0.6
    c: float = 0.5
    x: float = 2.0
    p: float = 1.0
    far: float = 0.05
    N: int = 20
    calib_trials: int = 10_000
    modes: Sequence[Mode] = ()
    theta_deg: float = 10.0
    floor_ratio: float = DEFAULT_FLOOR
    workers: int = 1
    out: Optional[Path] = None

    def __post_init__(self):
        self.kind = ExperimentKind(self.kind)
        self.sweep = list(self.sweep)
        self.modes = [Mode(m) for m in self.modes]
        if self.trials < 100:
            raise ValueError("trials must be >= 100")
        if not self.sweep:
            raise ValueError("sweep must be non-empty")
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.kind is ExperimentKind.CONCENTRATION and self.x <= 0:
            raise ValueError("x must be positive")
        if self.kind is not ExperimentKind.CONCENTRATION and not 0 < self.far < 1:
            raise ValueError("far must lie in (0, 1)")


def time_length(N: int, c: float) -> int:
    T = N / c
    if abs(T - round(T)) > 1e-9:
        raise ValueError(f"N/c = {T} is not an integer")
    return int(round(T))


def binomial_se(p: float, n: int) -> float:
    return math.sqrt(max(p * (1 - p), 0.0) / n) if n > 0 else 0.0


@dataclass
class ConcentrationPoint:
    N: int
    T: int
    x: float
    method: str
    prob: float
    log_prob_over_T: float
    std_err: float
    censored: bool
    trials: int
    seed: int


@dataclass
class DetectionPoint:
    N: int
    T: int
    snr_db: float
    p: float
    method: str
    gamma: float
    far_target: float
    far_empirical: float
    power: float
    detect_error: float
    std_err: float
    trials: int
    seed: int


# --- concentration -----------------------------------------------------------

def concentration_block(start, stop, *, noise_model: NoiseModel, N: int, x: float, master_seed: int, keys: tuple):
    """Counts of ``||R_hat - R|| > x`` for the biased and unbiased estimators."""
    T = noise_model.T
    n = stop - start
    W = np.empty((n, N, T), complex)
    for j, i in enumerate(range(start, stop)):
        W[j] = sample_complex_gaussian_matrix(trial_streams(master_seed, *keys, i)[0], N, T)
    V = W @ noise_model.factor
    sums = lag_sums_fft(V)
    hits = {}
    for kind in EstimatorKind:
        D = toeplitz_from_lags(normalize_lags(sums, N, T, kind)) - noise_model.R
        err = np.abs(np.linalg.eigvalsh(D)).max(axis=-1)
        hits[kind] = int(np.count_nonzero(err > x))
    return hits


def run_concentration(cfg: ExperimentConfig) -> List[ConcentrationPoint]:
    pts = []
    for idx, N in enumerate(cfg.sweep):
        N = int(N)
        T = time_length(N, cfg.c)
        model = NoiseModel.ar1(cfg.a, T)
        parts = montecarlo.run_blocks(
            concentration_block, cfg.trials, workers=cfg.workers,
            noise_model=model, N=N, x=cfg.x, master_seed=cfg.seed,
            keys=(montecarlo.EXP_CONCENTRATION, idx, 0),
        )
        for kind in EstimatorKind:
            hits = sum(part[kind] for part in parts)
            prob = hits / cfg.trials
            censored = hits == 0
            ordinate = math.log(1.0 / cfg.trials) / T if censored else math.log(prob) / T
            pts.append(ConcentrationPoint(N, T, cfg.x, kind.value, prob, ordinate,
                                          binomial_se(prob, cfg.trials), censored, cfg.trials, cfg.seed))
        M = symbol_sup_norm(model.covariance)
        q = BoundQuery(cfg.x, cfg.c, M, T)
        for name, E in (("biased-theory", biased_exponent(q)), ("unbiased-theory", unbiased_exponent(q))):
            pts.append(ConcentrationPoint(N, T, cfg.x, name, math.exp(-T * E), -E, 0.0, False, 0, cfg.seed))
    return pts


# --- detection ---------------------------------------------------------------

def _alphas(cfg, model, N, p, modes, keys, hypothesis, n_trials=None):
    return simulate_alphas(
        cfg.trials if n_trials is None else n_trials,
        workers=cfg.workers, noise_model=model, N=N, p=p, modes=modes,
        master_seed=cfg.seed, keys=keys, hypothesis=hypothesis,
        theta_deg=cfg.theta_deg, floor_ratio=cfg.floor_ratio,
    )


def _calibrate_all(cfg, model, N, modes, exp, point):
    null = _alphas(cfg, model, N, 0.0, modes, (exp, point, montecarlo.PHASE_CALIBRATION),
                   Hypothesis.H0, cfg.calib_trials)
    gammas = {m: quantile_threshold(null[m], cfg.far) for m in modes}
    fresh = _alphas(cfg, model, N, 0.0, modes, (exp, point, montecarlo.PHASE_H0), Hypothesis.H0)
    far_emp = {m: float(np.mean(fresh[m] >= gammas[m])) for m in modes}
    return gammas, far_emp


def _detection_rows(cfg, N, T, snr_db, p, modes, gammas, far_emp, alt):
    rows = []
    for m in modes:
        power = float(np.mean(alt[m] >= gammas[m]))
        rows.append(DetectionPoint(N, T, snr_db, p, m.value, gammas[m], cfg.far, far_emp[m], power,
                                   1.0 - power, binomial_se(power, cfg.trials), cfg.trials, cfg.seed))
    return rows


def run_detection_vs_n(cfg: ExperimentConfig) -> List[DetectionPoint]:
    modes = cfg.modes or [Mode.BIASED, Mode.UNBIASED, Mode.WHITE, Mode.ORACLE]
    snr_db = 10 * math.log10(cfg.p) if cfg.p > 0 else -math.inf
    pts = []
    for idx, N in enumerate(cfg.sweep):
        N = int(N)
        T = time_length(N, cfg.c)
        model = NoiseModel.ar1(cfg.a, T)
        gammas, far_emp = _calibrate_all(cfg, model, N, modes, montecarlo.EXP_DETECTION, idx)
        alt = _alphas(cfg, model, N, cfg.p, modes, (montecarlo.EXP_DETECTION, idx, montecarlo.PHASE_H1), Hypothesis.H1)
        pts += _detection_rows(cfg, N, T, snr_db, cfg.p, modes, gammas, far_emp, alt)
    return pts


def run_power_vs_snr(cfg: ExperimentConfig) -> List[DetectionPoint]:
    modes = cfg.modes or [Mode.BIASED, Mode.UNBIASED, Mode.BIASED_PN, Mode.UNBIASED_PN, Mode.ORACLE]
    N = int(cfg.N)
    T = time_length(N, cfg.c)
    model = NoiseModel.ar1(cfg.a, T)
    # thresholds do not depend on the SNR: calibrate once
    gammas, far_emp = _calibrate_all(cfg, model, N, modes, montecarlo.EXP_POWER, 0)
    pts = []
    for idx, snr_db in enumerate(cfg.sweep):
        p = 10.0 ** (snr_db / 10.0)
        alt = _alphas(cfg, model, N, p, modes, (montecarlo.EXP_POWER, idx, montecarlo.PHASE_H1), Hypothesis.H1)
        pts += _detection_rows(cfg, N, T, float(snr_db), p, modes, gammas, far_emp, alt)
    return pts


def run(cfg: ExperimentConfig):
    runner = {
        ExperimentKind.CONCENTRATION: run_concentration,
        ExperimentKind.DETECTION_VS_N: run_detection_vs_n,
        ExperimentKind.POWER_VS_SNR: run_power_vs_snr,
    }[cfg.kind]
    pts = runner(cfg)
    if cfg.out is not None:
        write_csv(pts, cfg.out)
    return pts


# --- CSV ---------------------------------------------------------------------

def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.9g}"
    return str(v)


def to_csv(points) -> str:
    if not points:
        raise ValueError("no points to write")
    names = [f.name for f in fields(points[0])]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(names)
    for pt in points:
        row = asdict(pt)
        w.writerow([_fmt(row[n]) for n in names])
    return buf.getvalue()


def write_csv(points, path) -> None:
    Path(path).write_text(to_csv(points), encoding="utf-8", newline="\n")
