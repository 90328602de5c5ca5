"""Write the CSV datasets of all nine figures.

Usage: python3 scripts/make_figures.py [--out DIR] [--seed N] [--only fig1,fig3]
"""
import argparse
import time
from pathlib import Path

from qcomplement.sweep import FIGURES, SweepConfig, figure_data


def main():
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--out", default="out")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--only", default=None, help="comma-separated figure ids")
    args = p.parse_args()
    cfg = SweepConfig(seed=args.seed, out_dir=Path(args.out))
    figures = args.only.split(",") if args.only else FIGURES
    for fig in figures:
        start = time.perf_counter()
        path = figure_data(fig, cfg).write(cfg.out_dir)
        print(f"{path} ({time.perf_counter() - start:.1f}s)")


if __name__ == "__main__":
    main()
