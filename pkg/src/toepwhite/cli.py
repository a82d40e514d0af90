"""Command-line front end.

Precedence of settings: command-line flags, then ``--config`` file keys
(``key = value`` lines using the flag names), then built-in defaults.
Exit status is 0 on success, 1 on a validation error and 2 on a runtime error.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import checks
from .detector import DetectionConfig, Mode, calibrate_threshold, detect
from .estimators import EstimatorKind, estimate_lags_fft
from .experiments import ExperimentConfig, ExperimentKind, run, time_length, to_csv
from .model import Hypothesis, NoiseModel, SourceModel, derive_seed, observe
from .obsfile import load_observation, save_observation


class UsageError(Exception):
    pass


def parse_grid(text: str, integer: bool = False):
    """``lo:hi:step`` inclusive of ``hi``."""
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"grid must be lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError(f"empty grid {text!r}")
    n = int(math.floor((hi - lo) / step + 1e-9)) + 1
    vals = [lo + i * step for i in range(n)]
    if integer:
        if any(abs(v - round(v)) > 1e-9 for v in vals):
            raise argparse.ArgumentTypeError(f"grid {text!r} must contain integers")
        return [int(round(v)) for v in vals]
    return vals


def _n_grid(text):
    return parse_grid(text, integer=True)


def _modes(text):
    try:
        return [Mode(m.strip()) for m in text.split(",") if m.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


ESTIMATORS = [m.value for m in Mode]

# flag name -> (type, help)
FLAGS = {
    "a": (float, "AR(1) coefficient of the noise"),
    "c": (float, "aspect ratio N/T"),
    "x": (float, "deviation level for the concentration experiment"),
    "p": (float, "source power"),
    "snr-grid": (parse_grid, "SNR sweep lo:hi:step in dB"),
    "n-grid": (_n_grid, "sensor-count sweep lo:hi:step"),
    "N": (int, "number of sensors"),
    "T": (int, "number of time samples"),
    "far": (float, "target false-alarm rate"),
    "gamma": (float, "fixed detection threshold"),
    "estimator": (str, "covariance estimator: " + "|".join(ESTIMATORS)),
    "modes": (_modes, "comma-separated estimator modes for curve experiments"),
    "trials": (int, "Monte Carlo trials per point"),
    "calib-trials": (int, "null trials for threshold calibration"),
    "seed": (int, "master seed (default: $TOEPWHITE_SEED or 0)"),
    "workers": (int, "worker processes (results do not depend on it)"),
    "out": (Path, "output path"),
    "input": (Path, "observation block file"),
    "noise-input": (Path, "pure-noise block file for the *-pn estimators"),
    "floor-ratio": (float, "eigenvalue floor for inverses, relative to the largest"),
}

COMMON = {"a": 0.6, "c": 0.5, "workers": 1, "floor-ratio": 1e-8}
SUBCOMMANDS = {
    "estimate": (
        "estimate lags from a stored block, or emit a seeded sample block",
        ["a", "c", "p", "N", "T", "estimator", "seed", "out", "input", "workers", "floor-ratio"],
        {"estimator": "biased", "p": 0.0, "N": 20},
    ),
    "detect": (
        "run the GLRT on a stored block",
        ["a", "c", "gamma", "far", "estimator", "calib-trials", "seed", "input", "noise-input", "workers", "floor-ratio"],
        {"estimator": "biased", "calib-trials": 10_000},
    ),
    "calibrate": (
        "calibrate a threshold at a target false-alarm rate",
        ["a", "c", "N", "T", "far", "estimator", "calib-trials", "seed", "workers", "floor-ratio"],
        {"estimator": "biased", "far": 0.05, "N": 20, "calib-trials": 10_000},
    ),
    "concentration": (
        "error-probability curves of the covariance estimators",
        ["a", "c", "x", "n-grid", "trials", "seed", "workers", "out", "floor-ratio"],
        {"x": 2.0, "n-grid": [10, 20, 30, 40], "trials": 100_000},
    ),
    "detection-curve": (
        "detection error versus number of sensors",
        ["a", "c", "p", "far", "n-grid", "modes", "trials", "calib-trials", "seed", "workers", "out", "floor-ratio"],
        {"p": 1.0, "far": 0.05, "n-grid": list(range(10, 51, 5)), "trials": 10_000, "calib-trials": 10_000},
    ),
    "power-curve": (
        "detection power versus SNR",
        ["a", "c", "N", "far", "snr-grid", "modes", "trials", "calib-trials", "seed", "workers", "out", "floor-ratio"],
        {"N": 20, "far": 0.05, "snr-grid": parse_grid("-10:4:1"), "trials": 10_000, "calib-trials": 10_000},
    ),
    "selftest": ("run the identity self-checks", [], {}),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage()}")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="toepwhite", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, (help_text, flags, _) in SUBCOMMANDS.items():
        sp = sub.add_parser(name, help=help_text, description=help_text)
        sp.add_argument("--config", type=Path, default=argparse.SUPPRESS, help="key = value settings file")
        for flag in flags:
            typ, h = FLAGS[flag]
            kw = {"type": typ, "default": argparse.SUPPRESS, "help": h}
            if flag == "estimator":
                kw["choices"] = ESTIMATORS
            sp.add_argument(f"--{flag}", dest=flag, **kw)
        if name == "estimate":
            sp.add_argument("--emit-sample", dest="emit-sample", action="store_true", default=argparse.SUPPRESS,
                            help="write a seeded N x T observation block to --out")
    return parser


def read_config(path: Path, allowed) -> dict:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lstrip("-")
        if key not in allowed:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        typ = FLAGS[key][0]
        try:
            out[key] = typ(value)
        except (ValueError, argparse.ArgumentTypeError) as exc:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {exc}") from None
    if "estimator" in out and out["estimator"] not in ESTIMATORS:
        raise UsageError(f"{path}: estimator must be one of {ESTIMATORS}")
    return out


def resolve(argv) -> tuple:
    """Parse ``argv`` and merge defaults, config file and flags."""
    ns = build_parser().parse_args(argv)
    given = vars(ns)
    command = given.pop("command")
    _, flags, defaults = SUBCOMMANDS[command]
    settings = {k: v for k, v in COMMON.items() if k in flags}
    settings.update(defaults)
    env_seed = os.environ.get("TOEPWHITE_SEED")
    if "seed" in flags:
        try:
            settings["seed"] = int(env_seed) if env_seed else 0
        except ValueError:
            raise UsageError(f"TOEPWHITE_SEED must be an integer, got {env_seed!r}") from None
    config = given.pop("config", None)
    if config is not None:
        settings.update(read_config(config, set(flags)))
    settings.update(given)
    return command, settings


def _dims(s):
    N = s.get("N")
    T = s.get("T")
    if T is None:
        T = time_length(N, s["c"])
    if N < 1 or T < 1:
        raise UsageError("N and T must be positive")
    return N, T


def _cmd_estimate(s, out):
    if s.get("emit-sample"):
        if "out" not in s:
            raise UsageError("--emit-sample needs --out")
        N, T = _dims(s)
        hyp = Hypothesis.H1 if s["p"] > 0 else Hypothesis.H0
        keys = derive_seed(s["seed"], 0).spawn(2)
        Y = observe(hyp, keys[0], keys[1], NoiseModel.ar1(s["a"], T), SourceModel(N, s["p"]), N, T)
        save_observation(Y, s["out"])
        print(f"wrote {N}x{T} {hyp.value} block to {s['out']}", file=out)
        return 0
    if "input" not in s:
        raise UsageError("estimate needs --input (or --emit-sample)")
    if s["estimator"] not in ("biased", "unbiased"):
        raise UsageError("estimate supports --estimator biased|unbiased")
    Y = load_observation(s["input"])
    est = estimate_lags_fft(Y, EstimatorKind(s["estimator"]))
    lines = ["k,re,im"] + [f"{k},{z.real:.9g},{z.imag:.9g}" for k, z in enumerate(est.lags)]
    text = "\n".join(lines) + "\n"
    if "out" in s:
        Path(s["out"]).write_text(text, encoding="utf-8", newline="\n")
    else:
        out.write(text)
    return 0


def _cmd_detect(s, out):
    if "input" not in s:
        raise UsageError("detect needs --input")
    Y = load_observation(s["input"])
    N, T = Y.shape
    mode = Mode(s["estimator"])
    gamma = s.get("gamma")
    far = s.get("far")
    if gamma is not None and far is not None:
        raise UsageError("give either --gamma or --far, not both")
    if gamma is None and far is None:
        raise UsageError("detect needs --gamma or --far")
    noise_block = None
    if mode.needs_noise_block:
        if "noise-input" not in s:
            raise UsageError(f"--estimator {mode.value} needs --noise-input")
        noise_block = load_observation(s["noise-input"])
    try:
        cfg = DetectionConfig(mode, gamma=gamma, far=far, calib_trials=s["calib-trials"],
                              calib_seed=s["seed"], floor_ratio=s["floor-ratio"])
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    needs_model = mode is Mode.ORACLE or gamma is None
    model = NoiseModel.ar1(s["a"], T) if needs_model else None
    res = detect(Y, cfg, model, noise_block, workers=s["workers"])
    print(f"alpha={res.alpha:.9g}", file=out)
    print(f"gamma={res.gamma:.9g}", file=out)
    print(f"decision={res.decision.value}", file=out)
    if res.whitening_flag:
        print("note: eigenvalue floor applied to the covariance estimate", file=out)
    return 0


def _cmd_calibrate(s, out):
    N, T = _dims(s)
    gamma = calibrate_threshold(Mode(s["estimator"]), NoiseModel.ar1(s["a"], T), N, s["calib-trials"],
                                s["seed"], s["far"], s["floor-ratio"], s["workers"])
    print(f"gamma={gamma:.9g}", file=out)
    return 0


def _cmd_experiment(command, s, out):
    kind = ExperimentKind(command)
    sweep = s["snr-grid"] if kind is ExperimentKind.POWER_VS_SNR else s["n-grid"]
    kw = dict(kind=kind, sweep=sweep, trials=s["trials"], seed=s["seed"], a=s["a"], c=s["c"],
              workers=s["workers"], out=s.get("out"), floor_ratio=s["floor-ratio"])
    for key, name in (("x", "x"), ("p", "p"), ("far", "far"), ("N", "N"), ("calib-trials", "calib_trials"),
                      ("modes", "modes")):
        if key in s:
            kw[name] = s[key]
    try:
        cfg = ExperimentConfig(**kw)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    pts = run(cfg)
    if cfg.out is None:
        out.write(to_csv(pts))
    else:
        print(f"wrote {len(pts)} rows to {cfg.out}", file=out)
    return 0


def _cmd_selftest(s, out):
    results = checks.run_selftest()
    for r in results:
        print(r.line(), file=out)
    return 0 if all(r.passed for r in results) else 2


def main(argv=None, out=None) -> int:
    out = sys.stdout if out is None else out
    try:
        command, s = resolve(sys.argv[1:] if argv is None else argv)
        if command == "estimate":
            return _cmd_estimate(s, out)
        if command == "detect":
            return _cmd_detect(s, out)
        if command == "calibrate":
            return _cmd_calibrate(s, out)
        if command == "selftest":
            return _cmd_selftest(s, out)
        return _cmd_experiment(command, s, out)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except (ValueError, OSError, RuntimeError, np.linalg.LinAlgError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
