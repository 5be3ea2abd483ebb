#!/usr/bin/env python3
"""Growth-exponent study at the free boundary of the reference unilateral
solution.

Solves the 3/2-homogeneous instance on a ladder of lattices, fits the
oscillation growth exponent around the free-boundary point at each
resolution, and prints the dyadic oscillation table for the finest level.
The exponent should approach 1.5 from below as h shrinks.

Usage:
    python3 scripts/exponent_study.py [--levels K] [--x0 X,Y] [--out FILE]
"""

from __future__ import annotations

import argparse

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
    ap.add_argument("--x0", default="0,0", help="fit center, comma-separated")
    ap.add_argument("--out", help="optional CSV destination")
    args = ap.parse_args()

    x0 = [float(t) for t in args.x0.split(",") if t.strip()]
    rows = []
    last_fit = None
    print(f"{'h':>10} {'kappa':>9} {'radii':>7} {'annulus nodes':>14}")
    for k in range(args.levels):
        h = 1.0 / (32 * 2**k)
        grid = GridSpec(3, h)
        psi = data.make_field(grid, 0.0)
        g = data.make_field(grid, {"name": "homogeneous_3_2", "params": {}})
        u = signorini.solve_signorini(
            signorini.SignoriniProblem(grid, psi, g)
        )
        fit = signorini.exponent_fit(u, psi, x0)
        rows.append((h, fit.kappa, len(fit.radii), fit.annulus_nodes))
        last_fit = fit
        print(f"{h:>10.6f} {fit.kappa:>9.4f} {len(fit.radii):>7} {fit.annulus_nodes:>14}")

    print("\noscillation ladder at the finest level:")
    print(f"{'radius':>10} {'oscillation':>14}")
    for r, osc in zip(last_fit.radii, last_fit.oscillations):
        print(f"{r:>10.6f} {osc:>14.6e}")
    if args.out:
        write_csv(args.out, ["h", "kappa", "n_radii", "annulus_nodes"], rows)
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
