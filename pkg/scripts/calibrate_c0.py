#!/usr/bin/env python3
"""Calibrate the dichotomy constant by bisection and report the frozen value.

The two-branch contact classifier compares the solved subgraph against a
wedge sharpened to ``theta + C0*eps`` (it must fit inside the subgraph on
both branches) and one blunted to ``theta - C0*eps`` (it must contain the
subgraph on the full-contact branch, declared when ``theta >= C0*eps``).
Sharpening shrinks the wedge and blunting grows it, so both inclusion
defects are monotone decreasing in the constant, and each side has a
smallest workable constant that bisection finds.  The theory guarantees a
workable constant exists but never values it; a constant calibrated too
small is the one failure mode the classifier is allowed to report.

For every instance on the acceptance (theta, eps) grid this script
bisects

* ``C_in`` — the smallest constant whose sharpened wedge fits inside the
  subgraph (required on every cell), and
* ``C_out`` — the smallest constant whose blunted wedge contains the
  subgraph (required wherever the branch rule declares full contact),

then reports which integer constants satisfy both requirements together
with the branch rule on every cell.  The package default (10.0) was
frozen from exactly this experiment at h = 1/64.

Usage:
    python3 scripts/calibrate_c0.py [--h H] [--c-max C] [--out FILE]
"""

from __future__ import annotations

import argparse

from wedgeflow import barriers, minimal_graph
from wedgeflow.grid import GridSpec
from wedgeflow.io_utils import write_csv

THETAS = (0.02, 0.05, 0.1, 0.2, 0.4)
EPSS = (0.002, 0.005, 0.01, 0.02, 0.05)


def bisect_smallest(pred, lo: float, hi: float, iters: int = 30) -> float | None:
    """Smallest c in [lo, hi] with pred(c) true, for pred monotone in c."""
    if not pred(hi):
        return None
    if pred(lo):
        return lo
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if pred(mid):
            hi = mid
        else:
            lo = mid
    return hi


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--h", type=float, default=1 / 64, help="grid spacing")
    ap.add_argument(
        "--c-max", type=float, default=40.0,
        help="upper end of the constant search bracket",
    )
    ap.add_argument("--out", help="optional CSV destination")
    args = ap.parse_args()

    grid = GridSpec(3, args.h)
    rows = []
    print(f"h = {grid.h:g}; bisecting constants in [0, {args.c_max:g}]")
    print(f"{'theta':>7} {'eps':>7} {'theta/eps':>10} {'C_in':>9} {'C_out':>9}")
    for th in THETAS:
        for ep in EPSS:
            prob = minimal_graph.wedge_instance(grid, 0.0, th, ep)
            u = minimal_graph.solve_min_graph(prob)

            def res_at(c: float):
                return barriers.dichotomy(u, prob.psi, 0.0, th, ep, c0=c)

            c_in = bisect_smallest(
                lambda c: res_at(c).lower_defect <= res_at(c).tol, 0.0, args.c_max
            )
            c_out = bisect_smallest(
                lambda c: res_at(c).upper_defect <= res_at(c).tol, 0.0, args.c_max
            )
            rows.append((th, ep, th / ep, c_in, c_out))
            fmt = lambda v: "none" if v is None else f"{v:.3f}"
            print(
                f"{th:>7g} {ep:>7g} {th / ep:>10.1f} "
                f"{fmt(c_in):>9} {fmt(c_out):>9}"
            )

    # a constant C works iff on every cell the sharpened wedge fits inside
    # the subgraph (C >= C_in) and, whenever the branch rule declares full
    # contact (theta >= C*eps), the blunted wedge contains the subgraph
    # (C >= C_out)
    feasible = []
    for c in range(1, int(args.c_max) + 1):
        ok = True
        for th, ep, _, c_in, c_out in rows:
            if c_in is None or c < c_in:
                ok = False
            if th >= c * ep and (c_out is None or c < c_out):
                ok = False
        if ok:
            feasible.append(c)
    print(f"\nfeasible integer constants: {feasible or 'none'}")
    print("package default: C0 = 10.0"
          + (" (feasible)" if 10 in feasible else " (NOT feasible!)"))
    if args.out:
        write_csv(args.out, ["theta", "eps", "ratio", "c_in", "c_out"], rows)
        print(f"wrote {args.out}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
