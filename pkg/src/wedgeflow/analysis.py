"""Structural diagnostics for computed minimizers.

Three certificates live here:

* density monotonicity — the surface measure of the boundary inside a ball
  of radius r, normalized by r^(n-1), must be nondecreasing in r (up to the
  quadrature slack of the discretization);
* blow-up fitting — rescaling the boundary around a point by a geometric
  sequence of radii and fitting a wedge at every scale, recording how the
  relative fit defect decays;
* improvement of closeness — regressing the absolute fit defect against
  scale to certify that closeness to the best wedge improves like a power
  of the radius.

All three accept either a graph solution (a Field over a grid) or an exact
planar region (a PlanarSet).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import RangeError
from .flatland import PlanarSet, sample_boundary
from .geometry import Wedge, fit_wedge
from .grid import Field, subgraph_perimeter_in_ball

_TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ExperimentParams:
    """Knobs for blow-up experiments.

    ``rho0`` is the scale ratio between consecutive blow-up radii,
    ``scales`` how many radii to use, ``alpha`` the closeness-improvement
    exponent to certify (must be < 1/2: the generic contact exponent
    caps the achievable rate).
    """

    rho0: float = 0.5
    scales: int = 5
    alpha: float = 0.25

    def __post_init__(self) -> None:
        if not 0.0 < self.rho0 < 1.0:
            raise RangeError(f"rho0 must lie in (0, 1), got {self.rho0}")
        if self.scales < 3:
            raise RangeError(f"need at least 3 scales, got {self.scales}")
        if not 0.0 < self.alpha < 0.5:
            raise RangeError(f"alpha must lie in (0, 1/2), got {self.alpha}")


# ---------------------------------------------------------------------------
# density monotonicity
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MonotonicityProfile:
    """Normalized boundary measure A(r) over a radius ladder.

    ``slacks[i]`` is the tolerance granted to the comparison
    A(radii[i]) <= A(radii[i+1]) + slacks[i]; ``worst_violation`` is the
    largest signed excess A(r_small) - A(r_big) observed (negative when
    the profile is strictly monotone).
    """

    radii: tuple[float, ...]
    values: tuple[float, ...]
    slacks: tuple[float, ...]
    monotone: bool
    worst_violation: float


def trace_length_in_ball(s: PlanarSet, center, r: float) -> float:
    """Exact length of the planar boundary trace inside the closed ball."""
    c = np.asarray(center, dtype=float)
    if c.shape != (2,):
        raise ValueError("center must be a planar point")
    if r <= 0:
        raise RangeError("radius must be positive")
    total = 0.0
    for piece in s.pieces():
        if piece[0] == "seg":
            p, q = piece[1], piece[2]
            v = q - p
            L2 = float(v @ v)
            if L2 == 0.0:
                continue
            w = p - c
            # |w + t v|^2 <= r^2
            bq = float(w @ v) / L2
            cq = (float(w @ w) - r * r) / L2
            disc = bq * bq - cq
            if disc <= 0.0:
                continue
            root = math.sqrt(disc)
            t0 = max(-bq - root, 0.0)
            t1 = min(-bq + root, 1.0)
            if t1 > t0:
                total += (t1 - t0) * math.sqrt(L2)
        else:
            phi0, span = piece[1], piece[2]
            if span == 0.0:
                continue
            # unit-circle points within the ball: c . e(phi) >= rho
            rho = (1.0 + float(c @ c) - r * r) / 2.0
            nc = float(np.hypot(*c))
            if nc < 1e-15:
                overlap = abs(span) if rho <= 0.0 else 0.0
                total += overlap
                continue
            kappa = rho / nc
            if kappa > 1.0:
                continue
            if kappa <= -1.0:
                total += abs(span)
                continue
            w = math.acos(kappa)
            phic = math.atan2(c[1], c[0])
            # arc as a ccw interval [start, start + span_abs]
            start = phi0 if span > 0 else phi0 + span
            span_abs = abs(span)
            # window is the ccw interval [phic - w, phic + w] of length 2w
            a1 = (start - (phic - w)) % _TWO_PI
            t_hi = a1 + span_abs
            overlap = max(0.0, min(t_hi, 2.0 * w) - a1)
            if t_hi > _TWO_PI:
                overlap += max(0.0, min(t_hi - _TWO_PI, 2.0 * w))
            total += overlap
    return total


def monotonicity_profile(obj, center, radii, slack_constant: float = 4.0) -> MonotonicityProfile:
    """Check that r -> (boundary measure in B_r(center)) / r^(n-1) is nondecreasing.

    For a Field the boundary measure is the graph-surface quadrature, which
    carries an O(h) error near the ball rim, so each comparison gets slack
    ``slack_constant * h / r``.  For a PlanarSet the length is exact and
    the slack is a pure rounding allowance.
    """
    rs = [float(r) for r in radii]
    if len(rs) < 2:
        raise RangeError("need at least two radii")
    if any(r <= 0 for r in rs) or any(b <= a for a, b in zip(rs, rs[1:])):
        raise RangeError("radii must be positive and strictly increasing")

    if isinstance(obj, Field):
        c = np.asarray(center, dtype=float)
        if c.shape != (obj.grid.n,):
            raise ValueError(f"center must be a point in R^{obj.grid.n}")
        if float(np.linalg.norm(c[:-1])) + rs[-1] > 1.0 + 1e-12:
            raise RangeError("largest ball must stay inside the unit-ball domain")
        power = obj.grid.n - 1
        values = [subgraph_perimeter_in_ball(obj, c, r) / r**power for r in rs]
        slacks = [slack_constant * obj.grid.h / r for r in rs[:-1]]
    elif isinstance(obj, PlanarSet):
        c = np.asarray(center, dtype=float)
        if float(np.hypot(*c)) + rs[-1] > 1.0 + 1e-12:
            raise RangeError("largest ball must stay inside the unit disk")
        values = [trace_length_in_ball(obj, c, r) / r for r in rs]
        slacks = [1e-9 for _ in rs[:-1]]
    else:
        raise TypeError(f"expected Field or PlanarSet, got {type(obj).__name__}")

    violations = [values[i] - values[i + 1] for i in range(len(values) - 1)]
    monotone = all(v <= s for v, s in zip(violations, slacks))
    return MonotonicityProfile(
        radii=tuple(rs),
        values=tuple(values),
        slacks=tuple(slacks),
        monotone=monotone,
        worst_violation=max(violations),
    )


# ---------------------------------------------------------------------------
# blow-up sequences
# ---------------------------------------------------------------------------


def vertical_rescale(u: Field, eps: float) -> Field:
    """Divide a flat solution by twice its closeness parameter.

    This is the vertical normalization under which nearly-flat minimizers
    converge to a solution of the linear thin-obstacle problem.
    """
    if eps <= 0:
        raise RangeError(f"eps must be positive, got {eps}")
    return Field(u.grid, u.values / (2.0 * eps))


@dataclass(frozen=True)
class BlowupReport:
    """Wedge fits of the boundary at a geometric ladder of radii.

    ``epsilons[k]`` is the fit defect at radius ``radii[k]`` measured
    relative to that radius (the cloud is rescaled to the unit ball before
    fitting), so a clean wedge gives 0 at every scale and a generic
    contact point gives epsilons shrinking like radii**(1/2).
    """

    point: tuple[float, ...]
    radii: tuple[float, ...]
    epsilons: tuple[float, ...]
    wedges: tuple[Wedge, ...]


def blowup_sequence(obj, point, params: ExperimentParams | None = None) -> BlowupReport:
    """Fit wedges to the boundary of obj around a point at shrinking scales.

    Field: the boundary cloud is the lifted graph (node coordinates plus
    value); the fit sees its last two coordinates, i.e. the profile in the
    (constraint-normal, vertical) plane.  PlanarSet: the trace is resampled
    at each scale.  Scales with fewer than 8 cloud points are dropped;
    fewer than 3 usable scales raises RangeError.
    """
    p = ExperimentParams() if params is None else params
    radii_all = [p.rho0**k for k in range(p.scales)]

    radii: list[float] = []
    epsilons: list[float] = []
    wedges: list[Wedge] = []

    if isinstance(obj, Field):
        x0 = np.asarray(point, dtype=float)
        if x0.shape != (obj.grid.d,):
            raise ValueError(f"point must be a node coordinate in R^{obj.grid.d}")
        idx = np.rint((x0 + obj.grid.axis_coords[-1]) / obj.grid.h).astype(int)
        if np.any(idx < 0) or np.any(idx >= obj.grid.axis_size):
            raise RangeError("point lies outside the sampled box")
        u0 = float(obj.values[tuple(idx)])
        coords = obj.grid.node_coords().reshape(-1, obj.grid.d)
        lifted = np.concatenate([coords, obj.values.reshape(-1, 1)], axis=1)
        X0 = np.concatenate([x0, [u0]])
        shifted = lifted - X0
        dist = np.sqrt(np.einsum("ij,ij->i", shifted, shifted))
        for r in radii_all:
            sel = shifted[dist <= r * (1 + 1e-12)]
            if sel.shape[0] < 8:
                continue
            w, eps = fit_wedge(sel / r, 1.0)
            radii.append(r)
            epsilons.append(eps)
            wedges.append(w)
    elif isinstance(obj, PlanarSet):
        x0 = np.asarray(point, dtype=float)
        if x0.shape != (2,):
            raise ValueError("point must be a planar point")
        for r in radii_all:
            pts = sample_boundary(obj, spacing=r / 512.0) - x0
            dist = np.sqrt(np.einsum("ij,ij->i", pts, pts))
            sel = pts[dist <= r * (1 + 1e-12)]
            if sel.shape[0] < 8:
                continue
            w, eps = fit_wedge(sel / r, 1.0)
            radii.append(r)
            epsilons.append(eps)
            wedges.append(w)
    else:
        raise TypeError(f"expected Field or PlanarSet, got {type(obj).__name__}")

    if len(radii) < 3:
        raise RangeError("fewer than 3 scales carry enough boundary samples")
    return BlowupReport(
        point=tuple(np.asarray(point, dtype=float)),
        radii=tuple(radii),
        epsilons=tuple(epsilons),
        wedges=tuple(wedges),
    )


# ---------------------------------------------------------------------------
# improvement of closeness
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ImprovementReport:
    """Power-law certificate for shrinking wedge-fit defects.

    The absolute defect at radius r is epsilon(r) * r; fitting
    log(defect) ~ slope * log(r) over the fine scales (the coarsest is the
    reference and is excluded) gives rate = slope - 1, the exponent by
    which RELATIVE closeness improves per unit scale.  Scales already fit
    to machine precision are dropped; if fewer than two informative scales
    remain the certificate passes vacuously (the boundary IS a wedge).
    """

    rate: float
    alpha: float
    passes: bool
    vacuous: bool
    radii: tuple[float, ...]
    defects: tuple[float, ...]


def improvement_report(
    report: BlowupReport, alpha: float = 0.25, floor: float = 1e-13
) -> ImprovementReport:
    """Certify epsilon(r) -> 0 at rate at least alpha from a blow-up report."""
    if not 0.0 < alpha < 0.5:
        raise RangeError(f"alpha must lie in (0, 1/2), got {alpha}")
    rows = [
        (r, e * r)
        for k, (r, e) in enumerate(zip(report.radii, report.epsilons))
        if k > 0 and e >= floor
    ]
    if len(rows) < 2:
        return ImprovementReport(
            rate=math.inf,
            alpha=alpha,
            passes=True,
            vacuous=True,
            radii=tuple(r for r, _ in rows),
            defects=tuple(d for _, d in rows),
        )
    logs_r = np.log([r for r, _ in rows])
    logs_d = np.log([d for _, d in rows])
    slope = float(np.polyfit(logs_r, logs_d, 1)[0])
    rate = slope - 1.0
    return ImprovementReport(
        rate=rate,
        alpha=alpha,
        passes=rate >= alpha,
        vacuous=False,
        radii=tuple(r for r, _ in rows),
        defects=tuple(d for _, d in rows),
    )
