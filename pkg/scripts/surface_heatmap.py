"""Sweep the learning surface over an (n, m) grid and write CSV plus a heatmap.

    python scripts/surface_heatmap.py family.json metadist.json --out surface
"""

import argparse
from pathlib import Path

import numpy as np

from metasurface import io
from metasurface.simulate import surface_sweep


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("family")
    ap.add_argument("metadist")
    ap.add_argument("--out", default="surface")
    ap.add_argument("--policy", default="worst")
    ap.add_argument("--reps", type=int, default=2000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=1)
    args = ap.parse_args()

    F = io.load_family(args.family)
    Q = io.load_metadist(args.metadist)
    ns, ms = [1, 2, 4, 8, 16, 32, 64], [1, 2, 3, 4, 6, 8]
    rows = surface_sweep(F, Q, args.policy, ns, ms, args.reps, args.seed, args.workers)
    out = Path(args.out)
    out.with_suffix(".csv").write_text(io.surface_csv(rows))

    try:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt
    except ImportError:
        print("matplotlib not installed; wrote CSV only")
        return
    Z = np.array([r.mean for r in rows]).reshape(len(ns), len(ms))
    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.imshow(Z, origin="lower", aspect="auto", cmap="viridis")
    ax.set_xticks(range(len(ms)), ms)
    ax.set_yticks(range(len(ns)), ns)
    ax.set_xlabel("m (examples per task)")
    ax.set_ylabel("n (tasks)")
    fig.colorbar(im, label="expected meta-loss")
    fig.tight_layout()
    fig.savefig(out.with_suffix(".png"), dpi=120)


if __name__ == "__main__":
    main()
