"""Seed sweep over the Bernoulli-gated fixtures: how often is each verdict reached?

    python scripts/prob_sanity_sweep.py [--seeds 20] [--runs 200] [--bound 10]
"""

import argparse
from collections import Counter
from fractions import Fraction
from pathlib import Path

from tickcheck.verifier import VerificationTask, verify

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seeds", type=int, default=20)
    ap.add_argument("--runs", type=int, default=200)
    ap.add_argument("--bound", type=int, default=10)
    ap.add_argument("--threshold", type=Fraction, default=Fraction(95, 100))
    args = ap.parse_args(argv)

    for name in ("prob_q02", "prob_q20"):
        tally, estimates = Counter(), []
        for seed in range(args.seeds):
            task = VerificationTask(str(FIXTURES / f"{name}.mdl"), str(FIXTURES / "prob.tcs"), bound=args.bound,
                                    runs=args.runs, seed=seed, threshold=args.threshold)
            v = verify(task).verdicts[0]
            tally[v.result] += 1
            estimates.append(float(v.estimate))
        mean = sum(estimates) / len(estimates)
        print(f"{name}: {dict(sorted(tally.items()))}  mean estimate {mean:.4f}  "
              f"range [{min(estimates):.3f}, {max(estimates):.3f}]")


if __name__ == "__main__":
    main()
