#!/usr/bin/env python3
"""Convergence ladder for the constrained-harmonic solver against the
3/2-homogeneous closed form.

Solves the unilateral problem whose exact solution is known in closed
form on successively finer lattices, prints the max-norm error ladder and
the fitted convergence order, and optionally writes the table as CSV.

Usage:
    python3 scripts/convergence_study.py [--levels K] [--tol T] [--out FILE]
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from wedgeflow import data, signorini
from wedgeflow.grid import GridSpec
from wedgeflow.io_utils import write_csv


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument(
        "--levels", type=int, default=3,
        help="number of dyadic refinements starting at h=1/32",
    )
    ap.add_argument("--tol", type=float, default=1e-8, help="solver tolerance")
    ap.add_argument("--out", help="optional CSV destination")
    args = ap.parse_args()

    rows = []
    print(f"{'h':>10} {'error':>12} {'sweeps':>8} {'seconds':>9}")
    for k in range(args.levels):
        h = 1.0 / (32 * 2**k)
        grid = GridSpec(3, h)
        psi = data.make_field(grid, 0.0)
        g = data.make_field(grid, {"name": "homogeneous_3_2", "params": {}})
        t = time.perf_counter()
        u, info = signorini.solve_signorini(
            signorini.SignoriniProblem(grid, psi, g, tol=args.tol),
            return_info=True,
        )
        dt = time.perf_counter() - t
        err = float(np.max(np.abs(u.values - g.values)))
        rows.append((h, err, info.sweeps, dt))
        print(f"{h:>10.6f} {err:>12.3e} {info.sweeps:>8} {dt:>9.2f}")

    if len(rows) >= 2:
        hs = [r[0] for r in rows]
        errs = [r[1] for r in rows]
        order = float(np.polyfit(np.log(hs), np.log(errs), 1)[0])
        print(f"\nfitted convergence order: {order:.3f}")
    if args.out:
        write_csv(args.out, ["h", "max_error", "sweeps", "seconds"], rows)
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
