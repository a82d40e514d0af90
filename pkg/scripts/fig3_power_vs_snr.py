"""Detection power against SNR at N=20, including pure-noise-block estimators."""

from _common import parser
from toepwhite.experiments import ExperimentConfig, ExperimentKind, run

if __name__ == "__main__":
    args = parser(__doc__, 10_000, "power_vs_snr.csv").parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)
    cfg = ExperimentConfig(ExperimentKind.POWER_VS_SNR, range(-10, 5), N=20, trials=args.trials,
                           calib_trials=args.calib_trials, seed=args.seed, far=0.05,
                           workers=args.workers, out=args.out)
    for p in run(cfg):
        print(f"{p.snr_db:+5.1f} dB {p.method:12s} power={p.power:.4f}")
