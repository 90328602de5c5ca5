"""Run the acceptance criteria and exit nonzero if any fails."""
import sys

from qcomplement.acceptance import run_acceptance
from qcomplement.sweep import SweepConfig

if __name__ == "__main__":
    results = run_acceptance(SweepConfig())
    sys.exit(0 if all(r.passed for r in results) else 1)
