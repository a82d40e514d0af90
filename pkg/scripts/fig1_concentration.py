"""Tail probability of the covariance-estimation error, empirical vs. exponents (x=2, c=0.5, a=0.6)."""

from _common import parser
from toepwhite.experiments import ExperimentConfig, ExperimentKind, run

if __name__ == "__main__":
    args = parser(__doc__, 100_000, "concentration.csv").parse_args()
    args.out.parent.mkdir(parents=True, exist_ok=True)
    cfg = ExperimentConfig(ExperimentKind.CONCENTRATION, range(10, 41, 2), trials=args.trials, seed=args.seed,
                           x=2.0, c=0.5, a=0.6, workers=args.workers, out=args.out)
    pts = run(cfg)
    for p in pts:
        print(f"N={p.N:3d} {p.method:16s} {p.log_prob_over_T:+.5f}{'  (censored)' if p.censored else ''}")
