"""Audit every printed closed form against the numeric pipeline and print the report."""
import argparse
from pathlib import Path

from qcomplement.sweep import SweepConfig, compat_report


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", default="out")
    p.add_argument("--steps", type=int, default=None, help="grid resolution for both axes")
    args = p.parse_args()
    cfg = SweepConfig(alpha_steps=args.steps, param_steps=args.steps, out_dir=Path(args.out))
    report = compat_report(cfg)
    report.write(cfg.out_dir)
    print(report.to_csv(), end="")


if __name__ == "__main__":
    main()
