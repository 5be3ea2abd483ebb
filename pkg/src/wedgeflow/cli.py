"""Command-line front door.

Commands::

    wedgeflow solve signorini   --builtin NAME | --problem FILE  [--out DIR]
    wedgeflow solve graph       --builtin NAME | --problem FILE  [--out DIR]
    wedgeflow solve flatland    --config FILE | flags | --seed K [--out DIR]
    wedgeflow verify barrier    --n N --beta B [--h H] [--out DIR]
    wedgeflow analyze monotonicity | blowup | improvement | exponent | dichotomy
    wedgeflow report RUN_DIR... [--out FILE]

Exit codes: 0 success, 1 usage or validation error, 2 solver
non-convergence, 3 certificate failure.  All outputs are written
atomically and are byte-identical for identical inputs; the WEDGEFLOW_OUT
environment variable prefixes relative output directories.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analysis, barriers, data, flatland, minimal_graph, signorini
from .errors import ConfigError, GridError, SolverError, TheoremViolation
from .grid import Field, GridSpec, area_energy, dump_field_csv, load_field_csv
from .io_utils import read_json, resolve_out_dir, sanitize, write_csv, write_json


@dataclass(frozen=True)
class ExperimentConfig:
    """Resolved per-command parameter record."""

    command: str
    out: Path
    source: str | None = None
    seed: int | None = None


# ---------------------------------------------------------------------------
# shared helpers
# ---------------------------------------------------------------------------


def _parse_floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip() != ""]
    except ValueError as e:
        raise ConfigError(f"expected a comma-separated float list, got {text!r}") from e


def _field_spec(raw):
    """Normalize a JSON field spec: number | {'csv': path} | {'name', 'params'}."""
    if isinstance(raw, (int, float)):
        return float(raw)
    if isinstance(raw, dict):
        return raw
    raise ConfigError(f"bad field spec: {raw!r}")


def _builtin_specs(args) -> tuple[dict, float]:
    params = {}
    name = args.builtin
    if name == "wedge_trace":
        params = {
            "gamma": args.gamma if args.gamma is not None else 0.0,
            "theta": args.theta if args.theta is not None else 0.0,
            "eps": args.eps if args.eps is not None else 0.0,
        }
    elif name in ("homogeneous_3_2", "harmonic_quadratic"):
        if args.scale is not None:
            params = {"scale": args.scale}
    elif name == "constant":
        params = {"value": args.value if args.value is not None else 0.0}
    elif name == "affine":
        if not args.coeffs:
            raise ConfigError("--builtin affine requires --coeffs")
        params = {"coeffs": _parse_floats(args.coeffs)}
    elif name not in data.FAMILIES:
        raise ConfigError(
            f"unknown builtin {name!r}; choose from {sorted(data.FAMILIES)}"
        )
    g_spec = {"name": name, "params": params}
    psi = args.psi if args.psi is not None else 0.0
    return g_spec, psi


def _problem_inputs(args) -> tuple[GridSpec, Field, Field, float, int, str]:
    """Build (grid, psi, g, tol, max_iters, source) from flags or a JSON file."""
    if args.problem:
        spec = read_json(args.problem)
        if not isinstance(spec, dict) or "g" not in spec:
            raise ConfigError(f"problem file {args.problem} must define 'g'")
        n = int(spec.get("n", 3))
        h = float(spec.get("h", args.h if args.h is not None else 1.0 / 64))
        grid = GridSpec(n, h)
        g = data.make_field(grid, _field_spec(spec["g"]))
        psi = data.make_field(grid, _field_spec(spec.get("psi", 0.0)))
        tol = float(spec.get("tol", args.tol))
        max_iters = int(spec.get("max_iters", args.max_iters))
        return grid, psi, g, tol, max_iters, str(args.problem)
    if not args.builtin:
        raise ConfigError("provide --builtin NAME or --problem FILE")
    n = args.n if args.n is not None else 3
    h = args.h if args.h is not None else 1.0 / 64
    grid = GridSpec(n, h)
    g_spec, psi_value = _builtin_specs(args)
    g = data.make_field(grid, g_spec)
    psi = data.make_field(grid, float(psi_value))
    return grid, psi, g, args.tol, args.max_iters, str(args.builtin)


def _grid_from_solution_csv(path) -> GridSpec:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().strip().split(",")
    d = len(header) - 1
    if d < 1 or header[-1] != "value":
        raise GridError(f"{path} is not a solution CSV")
    raw = np.atleast_2d(np.loadtxt(path, delimiter=",", skiprows=1))
    rows = raw.shape[0]
    axis = round(rows ** (1.0 / d))
    if axis**d != rows:
        raise GridError(f"{path}: row count {rows} is not a {d}-dimensional lattice")
    last = raw[:axis, d - 1] if d == 1 else raw[:2, d - 1]
    h = float(last[1] - last[0])
    steps = round(1.0 / h)
    grid = GridSpec(d + 1, 1.0 / steps)
    if grid.axis_size != axis:
        raise GridError(f"{path}: lattice does not match an admissible grid")
    return grid


def _load_solution(path) -> Field:
    grid = _grid_from_solution_csv(path)
    return load_field_csv(grid, path)


def _planar_from_args(args) -> tuple[flatland.PlanarConfig, str]:
    if getattr(args, "config", None):
        raw = read_json(args.config)
        if not isinstance(raw, dict) or "a_deg" not in raw or "b_deg" not in raw:
            raise ConfigError(f"config file {args.config} must define a_deg and b_deg")
        cfg = flatland.PlanarConfig(
            a_deg=float(raw["a_deg"]),
            b_deg=float(raw["b_deg"]),
            side=str(raw.get("side", "ccw")),
            obstacle_deg=float(raw.get("obstacle_deg", -90.0)),
            delta=float(raw.get("delta", 0.0)),
        )
        return cfg, str(args.config)
    if getattr(args, "seed", None) is not None:
        cfg = flatland.random_config(args.seed)
        if args.delta:
            cfg = dataclasses.replace(cfg, delta=args.delta)
        return cfg, f"seed:{args.seed}"
    if args.a_deg is None or args.b_deg is None:
        raise ConfigError("provide --config FILE, --seed K, or --a-deg/--b-deg")
    cfg = flatland.PlanarConfig(
        a_deg=args.a_deg,
        b_deg=args.b_deg,
        side=args.side,
        obstacle_deg=args.obstacle_deg,
        delta=args.delta,
    )
    return cfg, "flags"


# ---------------------------------------------------------------------------
# solve
# ---------------------------------------------------------------------------


def _cmd_solve_signorini(args) -> int:
    grid, psi, g, tol, max_iters, source = _problem_inputs(args)
    problem = signorini.SignoriniProblem(grid, psi, g, tol=tol, max_iters=max_iters)
    u, info = signorini.solve_signorini(problem, return_info=True)
    comp = signorini.complementarity_report(u, psi)
    out = resolve_out_dir(args.out)
    dump_field_csv(u, out / "solution.csv")
    fb = signorini.free_boundary(u, psi)
    write_csv(
        out / "free_boundary.csv",
        [f"x{i + 1}" for i in range(grid.d)],
        fb.tolist(),
    )
    summary = {
        "command": "solve-signorini",
        "source": source,
        "n": grid.n,
        "h": grid.h,
        "sweeps": info.sweeps,
        "converged": info.converged,
        "final_update": info.final_update,
        "dirichlet_energy": signorini.dirichlet_energy(u),
        "contact_count": comp.contact_count,
        "constrained_count": comp.constrained_count,
        "contact_fraction": comp.contact_fraction,
        "max_kkt_residual": comp.max_kkt_residual,
        "max_contact_excess": comp.max_contact_excess,
        "min_slack": comp.min_slack,
    }
    if source == "homogeneous_3_2" and float(np.max(np.abs(psi.values))) == 0.0:
        exact = grid.evaluate(lambda *cs: data.u_three_halves(cs[0], cs[-1]))
        summary["oracle_error"] = float(np.max(np.abs(u.values - exact.values)))
    write_json(out / "summary.json", summary)
    return 0


def _cmd_solve_graph(args) -> int:
    grid, psi, g, tol, max_iters, source = _problem_inputs(args)
    problem = minimal_graph.GraphProblem(grid, psi, g, tol=tol, max_iters=max_iters)
    u, info = minimal_graph.solve_min_graph(problem, return_info=True)
    visc = minimal_graph.viscosity_check(u, psi, tol=tol)
    out = resolve_out_dir(args.out)
    dump_field_csv(u, out / "solution.csv")
    summary = {
        "command": "solve-graph",
        "source": source,
        "n": grid.n,
        "h": grid.h,
        "iterations": info.iterations,
        "converged": info.converged,
        "final_residual": info.final_residual,
        "area_energy": area_energy(u),
        "viscosity": {
            "tol_H": visc.tol_H,
            "max_free_curvature": visc.max_free_curvature,
            "max_contact_curvature": visc.max_contact_curvature,
            "min_slack": visc.min_slack,
            "contact_count": visc.contact_count,
            "ok": visc.ok,
        },
    }
    write_json(out / "summary.json", summary)
    return 0


def _cmd_solve_flatland(args) -> int:
    cfg, source = _planar_from_args(args)
    sol = flatland.taut_minimizer(cfg)
    out = resolve_out_dir(args.out)
    samples = flatland.sample_boundary(sol, spacing=2e-3)
    write_csv(out / "trace.csv", ["x", "y"], samples.tolist())
    arcs = set(sol.arc_after)
    write_csv(
        out / "vertices.csv",
        ["tag", "x", "y", "arc_to_next"],
        [
            (
                sol.tags[i] if sol.tags else "",
                sol.vertices[i][0],
                sol.vertices[i][1],
                i in arcs,
            )
            for i in range(len(sol.vertices))
        ],
    )
    summary = {
        "command": "solve-flatland",
        "source": source,
        "a_deg": cfg.a_deg,
        "b_deg": cfg.b_deg,
        "side": cfg.side,
        "obstacle_deg": cfg.obstacle_deg,
        "delta": cfg.delta,
        "length": sol.length,
        "degiorgi_perimeter": flatland.degiorgi_perimeter(sol, cfg.obstacle_deg),
        "cone": flatland.cone_check(sol),
        "tags": list(sol.tags),
    }
    write_json(out / "summary.json", summary)
    return 0


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------


def _cmd_verify_barrier(args) -> int:
    if args.beta is None:
        raise ConfigError("--beta is required")
    n = args.n if args.n is not None else 3
    h = args.h if args.h is not None else 1.0 / 128
    grid = GridSpec(n, h)
    report = barriers.barrier_certificate(grid, args.beta)
    line = (
        f"barrier n={n} beta={args.beta:g} h={h:g} "
        f"threshold={report.threshold:.6g} "
        f"max_divergence_form={report.max_divergence_form:.6g} "
        f"max_nondivergence_form={report.max_nondivergence_form:.6g} "
        f"ok={report.ok}"
    )
    print(line)
    if args.out:
        out = resolve_out_dir(args.out)
        write_csv(
            out / "certificate.csv",
            [
                "n",
                "beta",
                "h",
                "threshold",
                "max_divergence_form",
                "max_nondivergence_form",
                "margin",
                "ok",
            ],
            [
                (
                    n,
                    args.beta,
                    h,
                    report.threshold,
                    report.max_divergence_form,
                    report.max_nondivergence_form,
                    report.margin,
                    report.ok,
                )
            ],
        )
        write_json(
            out / "summary.json",
            {
                "command": "verify-barrier",
                "n": n,
                "beta": args.beta,
                "h": h,
                **{k: getattr(report, k) for k in (
                    "threshold",
                    "max_divergence_form",
                    "max_nondivergence_form",
                    "ok",
                )},
            },
        )
    if not report.ok:
        raise TheoremViolation(
            f"barrier certificate failed: {line}"
        )
    return 0


# ---------------------------------------------------------------------------
# analyze
# ---------------------------------------------------------------------------


def _analysis_object(args):
    """Field from --solution CSV, or PlanarSet from --config/--seed/flags."""
    if getattr(args, "solution", None):
        return _load_solution(args.solution), f"csv:{args.solution}"
    cfg, source = _planar_from_args(args)
    return flatland.taut_minimizer(cfg), source


def _cmd_analyze_monotonicity(args) -> int:
    obj, source = _analysis_object(args)
    if isinstance(obj, Field):
        dim = obj.grid.n
        default_radii = "0.125,0.25,0.5"
    else:
        dim = 2
        default_radii = "0.0625,0.125,0.25,0.5"
    center = _parse_floats(args.center) if args.center else [0.0] * dim
    radii = _parse_floats(args.radii) if args.radii else _parse_floats(default_radii)
    profile = analysis.monotonicity_profile(
        obj, center, radii, slack_constant=args.slack_constant
    )
    out = resolve_out_dir(args.out)
    write_csv(
        out / "monotonicity.csv",
        ["radius", "value"],
        list(zip(profile.radii, profile.values)),
    )
    write_json(
        out / "summary.json",
        {
            "command": "analyze-monotonicity",
            "source": source,
            "center": center,
            "radii": list(profile.radii),
            "values": list(profile.values),
            "slacks": list(profile.slacks),
            "monotone": profile.monotone,
            "worst_violation": profile.worst_violation,
        },
    )
    if not profile.monotone:
        raise TheoremViolation(
            f"density ratio decreased by {profile.worst_violation:.3e} beyond slack"
        )
    return 0


def _run_blowup(args):
    obj, source = _analysis_object(args)
    dim = obj.grid.d if isinstance(obj, Field) else 2
    point = _parse_floats(args.point) if args.point else [0.0] * dim
    params = analysis.ExperimentParams(
        rho0=args.rho0, scales=args.scales, alpha=args.alpha
    )
    return analysis.blowup_sequence(obj, point, params), source, point, params


def _cmd_analyze_blowup(args) -> int:
    report, source, point, _ = _run_blowup(args)
    out = resolve_out_dir(args.out)
    write_csv(
        out / "blowup.csv",
        ["radius", "epsilon", "gamma", "theta"],
        [
            (r, e, w.gamma, w.theta)
            for r, e, w in zip(report.radii, report.epsilons, report.wedges)
        ],
    )
    write_json(
        out / "summary.json",
        {
            "command": "analyze-blowup",
            "source": source,
            "point": point,
            "radii": list(report.radii),
            "epsilons": list(report.epsilons),
            "gammas": [w.gamma for w in report.wedges],
            "thetas": [w.theta for w in report.wedges],
        },
    )
    return 0


def _cmd_analyze_improvement(args) -> int:
    blowup, source, point, params = _run_blowup(args)
    report = analysis.improvement_report(blowup, alpha=params.alpha)
    out = resolve_out_dir(args.out)
    write_json(
        out / "summary.json",
        {
            "command": "analyze-improvement",
            "source": source,
            "point": point,
            "alpha": report.alpha,
            "rate": report.rate,
            "passes": report.passes,
            "vacuous": report.vacuous,
            "radii": list(report.radii),
            "defects": list(report.defects),
            "epsilons": list(blowup.epsilons),
        },
    )
    if not report.passes:
        raise TheoremViolation(
            f"closeness improved at rate {report.rate:.3f} < required {report.alpha:.3f}"
        )
    return 0


def _cmd_analyze_exponent(args) -> int:
    grid, psi, g, tol, max_iters, source = _problem_inputs(args)
    problem = signorini.SignoriniProblem(grid, psi, g, tol=tol, max_iters=max_iters)
    u = signorini.solve_signorini(problem)
    x0 = _parse_floats(args.x0) if args.x0 else [0.0] * grid.d
    fit = signorini.exponent_fit(u, psi, x0)
    out = resolve_out_dir(args.out)
    write_csv(
        out / "exponent.csv",
        ["radius", "oscillation"],
        list(zip(fit.radii, fit.oscillations)),
    )
    write_json(
        out / "summary.json",
        {
            "command": "analyze-exponent",
            "source": source,
            "n": grid.n,
            "h": grid.h,
            "x0": x0,
            "kappa": fit.kappa,
            "plane": list(fit.plane),
            "radii": list(fit.radii),
            "oscillations": list(fit.oscillations),
        },
    )
    return 0


def _cmd_analyze_dichotomy(args) -> int:
    if args.gamma is None or args.theta is None or args.eps is None:
        raise ConfigError("--gamma, --theta and --eps are required")
    n = args.n if args.n is not None else 3
    h = args.h if args.h is not None else 1.0 / 64
    grid = GridSpec(n, h)
    problem = minimal_graph.wedge_instance(grid, args.gamma, args.theta, args.eps)
    u = minimal_graph.solve_min_graph(problem)
    result = barriers.dichotomy(
        u, problem.psi, args.gamma, args.theta, args.eps, c0=args.c0
    )
    out = resolve_out_dir(args.out)
    payload = dataclasses.asdict(result)
    payload["failures"] = list(result.failures)
    write_json(
        out / "summary.json",
        {"command": "analyze-dichotomy", "n": n, "h": h, **sanitize(payload)},
    )
    barriers.certify_dichotomy(result)
    return 0


# ---------------------------------------------------------------------------
# report
# ---------------------------------------------------------------------------


def _cmd_report(args) -> int:
    runs = []
    schema: tuple | None = None
    for d in args.run_dirs:
        path = Path(d) / "summary.json"
        if not path.is_file():
            print(f"error: {path} is missing", file=sys.stderr)
            return 1
        try:
            payload = read_json(path)
        except json.JSONDecodeError:
            print(f"error: {path} is not valid JSON", file=sys.stderr)
            return 1
        if not isinstance(payload, dict) or "command" not in payload:
            print(f"error: {path} does not look like a run summary", file=sys.stderr)
            return 1
        key = (payload["command"], tuple(sorted(payload.keys())))
        if schema is None:
            schema = key
        elif key != schema:
            print(
                f"error: {path} has a different schema than earlier runs",
                file=sys.stderr,
            )
            return 1
        runs.append({"dir": str(d), **payload})
    consolidated = {"runs": runs}
    if args.out:
        write_json(Path(args.out), consolidated)
    else:
        print(json.dumps(sanitize(consolidated), indent=2, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_problem_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--problem", help="problem spec JSON file")
    p.add_argument("--builtin", help="builtin boundary-data family name")
    p.add_argument("--n", type=int, help="ambient dimension (default 3)")
    p.add_argument("--h", type=float, help="grid spacing (default 1/64)")
    p.add_argument("--psi", type=float, help="constant obstacle height (default 0)")
    p.add_argument("--scale", type=float, help="builtin family scale factor")
    p.add_argument("--value", type=float, help="constant family value")
    p.add_argument("--coeffs", help="affine family coefficients, comma-separated")
    p.add_argument("--gamma", type=float, help="wedge tilt (radians)")
    p.add_argument("--theta", type=float, help="wedge half-opening complement (radians)")
    p.add_argument("--eps", type=float, help="wedge trace perturbation size")
    p.add_argument("--tol", type=float, default=1e-8, help="solver tolerance")
    p.add_argument("--max-iters", type=int, default=200_000, help="iteration budget")
    p.add_argument("--out", default="run", help="output directory")


def _add_flatland_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="planar configuration JSON file")
    p.add_argument("--seed", type=int, help="draw a seeded random configuration")
    p.add_argument("--a-deg", type=float, help="trace start angle (degrees)")
    p.add_argument("--b-deg", type=float, help="trace end angle (degrees)")
    p.add_argument("--side", default="ccw", choices=("ccw", "cw"))
    p.add_argument("--obstacle-deg", type=float, default=-90.0)
    p.add_argument("--delta", type=float, default=0.0, help="obstacle half-angle")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="wedgeflow",
        description="Thin-obstacle minimal-surface solvers and certificates.",
    )
    sub = parser.add_subparsers(dest="command")

    solve = sub.add_parser("solve", help="run a solver").add_subparsers(dest="solver")
    ps = solve.add_parser("signorini", help="constrained harmonic solver")
    _add_problem_flags(ps)
    ps.set_defaults(func=_cmd_solve_signorini)
    pg = solve.add_parser("graph", help="constrained minimal-graph solver")
    _add_problem_flags(pg)
    pg.set_defaults(func=_cmd_solve_graph)
    pf = solve.add_parser("flatland", help="exact planar minimizer")
    _add_flatland_flags(pf)
    pf.add_argument("--out", default="run", help="output directory")
    pf.set_defaults(func=_cmd_solve_flatland)

    verify = sub.add_parser("verify", help="analytic certificates").add_subparsers(
        dest="certificate"
    )
    pb = verify.add_parser("barrier", help="strict supersolution certificate")
    pb.add_argument("--n", type=int, help="ambient dimension (default 3)")
    pb.add_argument("--beta", type=float, help="barrier curvature parameter")
    pb.add_argument("--h", type=float, help="grid spacing (default 1/128)")
    pb.add_argument("--out", help="optional output directory")
    pb.set_defaults(func=_cmd_verify_barrier)

    analyze = sub.add_parser("analyze", help="structural diagnostics").add_subparsers(
        dest="analysis"
    )

    pm = analyze.add_parser("monotonicity", help="density ratio ladder")
    pm.add_argument("--solution", help="solution CSV from a solve run")
    _add_flatland_flags(pm)
    pm.add_argument("--center", help="ball center, comma-separated")
    pm.add_argument("--radii", help="radius ladder, comma-separated")
    pm.add_argument("--slack-constant", type=float, default=4.0)
    pm.add_argument("--out", default="run", help="output directory")
    pm.set_defaults(func=_cmd_analyze_monotonicity)

    for name, fn in (("blowup", _cmd_analyze_blowup), ("improvement", _cmd_analyze_improvement)):
        pa = analyze.add_parser(name, help=f"{name} sequence around a point")
        pa.add_argument("--solution", help="solution CSV from a solve run")
        _add_flatland_flags(pa)
        pa.add_argument("--point", help="blow-up point, comma-separated")
        pa.add_argument("--scales", type=int, default=5)
        pa.add_argument("--rho0", type=float, default=0.5)
        pa.add_argument("--alpha", type=float, default=0.25)
        pa.add_argument("--out", default="run", help="output directory")
        pa.set_defaults(func=fn)

    pe = analyze.add_parser("exponent", help="contact growth exponent")
    _add_problem_flags(pe)
    pe.add_argument("--x0", help="free-boundary point, comma-separated")
    pe.set_defaults(func=_cmd_analyze_exponent)

    pd = analyze.add_parser("dichotomy", help="full-contact dichotomy certificate")
    pd.add_argument("--gamma", type=float)
    pd.add_argument("--theta", type=float)
    pd.add_argument("--eps", type=float)
    pd.add_argument("--c0", type=float, default=10.0)
    pd.add_argument("--n", type=int)
    pd.add_argument("--h", type=float)
    pd.add_argument("--out", default="run", help="output directory")
    pd.set_defaults(func=_cmd_analyze_dichotomy)

    pr = sub.add_parser("report", help="merge run summaries")
    pr.add_argument("run_dirs", nargs="*", help="run directories with summary.json")
    pr.add_argument("--out", help="write consolidated JSON here instead of stdout")
    pr.set_defaults(func=_cmd_report)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1
    if not hasattr(args, "func"):
        parser.print_help(sys.stderr)
        return 1
    try:
        return args.func(args)
    except SolverError as e:
        print(f"solver failed: {e}", file=sys.stderr)
        return 2
    except TheoremViolation as e:
        print(f"certificate failed: {e}", file=sys.stderr)
        return 3
    except (ValueError, OSError, json.JSONDecodeError) as e:
        # GridError/RangeError/ConfigError subclass ValueError
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
