"""Exact vs Monte Carlo error of the worst-case learner on the pair-singleton family.

Prints a table over n at m=1 for the balanced two-domain adversary, plus the
lower-bound rate v/(8n) where v is the family game value.
"""

import argparse
from fractions import Fraction

from metasurface.game import family_value
from metasurface.generators import pair_singleton_family
from metasurface.simulate import estimate_surface, exact_surface
from metasurface.verify import pair_singleton_metadist


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--reps", type=int, default=20_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-max", type=int, default=12)
    args = ap.parse_args()

    F = pair_singleton_family()
    Q = pair_singleton_metadist(Fraction(1, 2))
    v = family_value(F).value
    print(f"game value v = {v}")
    print(f"{'n':>3} {'exact':>12} {'mc':>10} {'ci':>23} {'v/(8n)':>9}")
    for n in range(1, args.n_max + 1):
        ex = exact_surface(F, Q, "worst", n, 1)
        est = estimate_surface(F, Q, "worst", n, 1, args.reps, args.seed)
        print(f"{n:>3} {float(ex):>12.6f} {est.mean:>10.6f} [{est.ci_low:.6f}, {est.ci_high:.6f}] "
              f"{float(v) / (8 * n):>9.5f}")


if __name__ == "__main__":
    main()
