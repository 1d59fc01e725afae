#!/usr/bin/env python3
"""Sample the eigenvalues function mu(gamma, delta) on a rectangular grid.

The output CSV has one row per (gamma, delta) pair and is convenient for
surface plots; the sampled surface is strictly increasing in gamma and
strictly decreasing in delta (the run aborts if the solver ever violates
that).

Usage:
    python scripts/evf_surface.py --q x^-0.5 --size 24 --out out/evf.csv
"""

import argparse
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from slzeros.cli import parse_q_argument  # noqa: E402
from slzeros.potential import PI  # noqa: E402
from slzeros.spectrum import evf_grid  # noqa: E402


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", default="zero")
    ap.add_argument("--size", type=int, default=16)
    ap.add_argument("--gamma-max", type=float, default=4 * PI)
    ap.add_argument("--delta-min", type=float, default=-3 * PI)
    ap.add_argument("--cells", type=int, default=2048)
    ap.add_argument("--out", default="out/evf.csv")
    args = ap.parse_args()

    q = parse_q_argument(args.q)
    gammas = np.linspace(0.35, args.gamma_max, args.size)
    deltas = np.linspace(args.delta_min, 0.92 * PI, args.size)
    grid = evf_grid(q, gammas, deltas, args.cells)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w") as f:
        f.write("gamma,delta,mu\n")
        for i, g in enumerate(gammas):
            for j, d in enumerate(deltas):
                f.write(f"{g:.17g},{d:.17g},{grid[i, j]:.17g}\n")
    print(f"{args.size}x{args.size} surface for q={q.describe()} -> {out}")
    print(f"mu range: [{grid.min():.6f}, {grid.max():.6f}]")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
