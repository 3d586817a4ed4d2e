"""Run the seven-constraint mini-CAS experiment and print the verdict table.

    python scripts/run_mini_cas.py [--bound 300] [--runs 100] [--seed 42] [--json out.json]
"""

import argparse
import sys
import time
from fractions import Fraction
from pathlib import Path

from tickcheck.verifier import VerificationTask, render_report, verify

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--bound", type=int, default=300)
    ap.add_argument("--runs", type=int, default=100)
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--threshold", type=Fraction, default=Fraction(95, 100))
    ap.add_argument("--det", action="store_true", help="use the deterministic variant of the model")
    ap.add_argument("--json", default=None)
    args = ap.parse_args(argv)

    model = FIXTURES / ("mini_cas_det.mdl" if args.det else "mini_cas.mdl")
    task = VerificationTask(str(model), str(FIXTURES / "mini_cas.tcs"), bound=args.bound, runs=args.runs,
                            seed=args.seed, threshold=args.threshold, mode="det" if args.det else "prob")
    start = time.perf_counter()
    report = verify(task)
    print(render_report(report), end="")
    print(f"total wall time {time.perf_counter() - start:.1f} s")
    if args.json:
        Path(args.json).write_text(render_report(report, "json"))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
