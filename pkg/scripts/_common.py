import argparse
from pathlib import Path


def parser(description, trials, out):
    ap = argparse.ArgumentParser(description=description)
    ap.add_argument("--trials", type=int, default=trials)
    ap.add_argument("--calib-trials", type=int, default=10_000)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--out", type=Path, default=Path("results") / out)
    return ap
