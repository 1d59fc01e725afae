#!/usr/bin/env python3
"""Trace how eigenfunction zeros migrate as a boundary angle sweeps.

Runs one beta sweep (left angle fixed at pi) and one alpha sweep (right
angle fixed at 0) for a chosen potential, writes the zero trajectories and
eigenvalue paths as CSV, and prints a compact summary of the endpoint
entry/exit events.

Usage:
    python scripts/zero_migration_study.py --q cos2x --n 2 --out out/migration
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from slzeros.cli import parse_q_argument  # noqa: E402
from slzeros.potential import PI  # noqa: E402
from slzeros.sweep import SweepPlan, run_sweep, uniform_grid  # noqa: E402


def dump(result, outdir: Path, tag: str) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / f"{tag}_path.csv", "w") as f:
        f.write("angle,mu\n")
        for angle, mu in result.eigenvalue_path:
            f.write(f"{angle:.17g},{mu:.17g}\n")
    for traj in result.trajectories:
        with open(outdir / f"{tag}_zero_{traj.identity:03d}.csv", "w") as f:
            f.write("angle,x\n")
            for angle, x in traj.points:
                f.write(f"{angle:.17g},{x:.17g}\n")


def summarize(result, tag: str) -> None:
    mus = [m for _, m in result.eigenvalue_path]
    print(f"{tag}: mu {mus[0]:.6f} -> {mus[-1]:.6f}, "
          f"{len(result.trajectories)} tracked zeros")
    for e in result.events:
        print(f"  event {e['event']} (zero {e['zero_id']}) in "
              f"({e['angle_lo']:.6f}, {e['angle_hi']:.6f}]")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--q", default="cos2x")
    ap.add_argument("--n", type=int, default=2)
    ap.add_argument("--grid", type=int, default=64)
    ap.add_argument("--cells", type=int, default=2048)
    ap.add_argument("--out", default="out/migration")
    args = ap.parse_args()

    q = parse_q_argument(args.q)
    outdir = Path(args.out)

    beta_plan = SweepPlan(q, args.n, "beta", PI,
                          uniform_grid("beta", args.grid), args.cells)
    beta_result = run_sweep(beta_plan)
    dump(beta_result, outdir, "beta")
    summarize(beta_result, f"beta sweep (q={q.describe()}, n={args.n})")

    alpha_plan = SweepPlan(q, args.n, "alpha", 0.0,
                           uniform_grid("alpha", args.grid), args.cells)
    alpha_result = run_sweep(alpha_plan)
    dump(alpha_result, outdir, "alpha")
    summarize(alpha_result, f"alpha sweep (q={q.describe()}, n={args.n})")

    print(f"wrote CSV files to {outdir}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
