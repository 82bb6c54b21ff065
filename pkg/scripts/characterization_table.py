"""Optimal error curve vs measured large-n error for random small families.

For each family the optimal error curve is computed exactly; the hard
meta-distribution at each m is then simulated at large n.
"""

import argparse

from metasurface.simulate import expected_surface
from metasurface.verify import characterization_cases


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--count", type=int, default=5)
    ap.add_argument("--n", type=int, default=500)
    args = ap.parse_args()

    for i, case in enumerate(characterization_cases(args.seed, count=args.count)):
        F = case.family
        print(f"family {i}: K={F.K} classes={len(F)} curve={[str(v) for v in case.curve.values]}")
        for m, hard in sorted(case.hard.items()):
            for eps, Q in hard:
                err = expected_surface(F, Q, "worst", args.n, m)
                print(f"  m={m} eps={eps} worst-case error at n={args.n}: {err:.4f}")


if __name__ == "__main__":
    main()
