"""Run every verification suite and print one line per check.

    python scripts/run_all_suites.py --seed 0 --workers 4
"""

import argparse
import sys

from metasurface.verify import SUITES, run_suite


def main() -> int:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()
    ok = True
    for suite in SUITES:
        report = run_suite(suite, args.seed, args.workers)
        print(f"== {suite}")
        for c in report.checks:
            print("  " + c.line())
        ok &= report.passed
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
