"""Detection error against the number of sensors at FAR 0.05 and p=1."""

from _common import parser
from toepwhite.experiments import ExperimentConfig, ExperimentKind, run

if __name__ == "__main__":
    args = parser(__doc__, 10_000, "detection_vs_n.csv").parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)
    cfg = ExperimentConfig(ExperimentKind.DETECTION_VS_N, range(10, 51, 5), trials=args.trials,
                           calib_trials=args.calib_trials, seed=args.seed, p=1.0, far=0.05,
                           workers=args.workers, out=args.out)
    for p in run(cfg):
        print(f"N={p.N:3d} {p.method:10s} error={p.detect_error:.4f} gamma={p.gamma:.4f} far={p.far_empirical:.4f}")
