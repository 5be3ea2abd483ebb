"""Planar wedge geometry in the last two coordinates of R^n.

A wedge is the intersection of two half-spaces whose normals live in the
plane spanned by the last two coordinate axes.  Writing
``e(w) = sin(w) * e_{n-1} + cos(w) * e_n``, the wedge with tilt ``gamma``
and half-opening-complement ``theta`` is

    {x : e(gamma + theta) . x <= 0  and  e(gamma - theta) . x <= 0}.

``theta = 0`` degenerates to a half-space, ``theta = pi/2 - |gamma|`` to the
sharpest admissible wedge.  Every admissible wedge contains the downward ray
{x_{n-1} = 0, x_n <= 0}, which is the obstacle these sets approximate.

All distance computations happen in the (x_{n-1}, x_n) plane; the remaining
coordinates are carried along untouched.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .errors import RangeError

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def unit_direction(omega: float, n: int) -> NDArray[np.float64]:
    """Unit vector sin(omega) * e_{n-1} + cos(omega) * e_n in R^n."""
    if n < 2:
        raise ValueError(f"ambient dimension must be >= 2, got {n}")
    e = np.zeros(n)
    e[-2] = math.sin(omega)
    e[-1] = math.cos(omega)
    return e


@dataclass(frozen=True)
class Wedge:
    """Wedge with face normals e(gamma + theta), e(gamma - theta).

    Constraints: |gamma| <= pi/2 and 0 <= theta <= pi/2 - |gamma|, so both
    normals point weakly upward and the wedge stays closed under moving
    points straight down.
    """

    gamma: float
    theta: float
    n: int = 3

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"ambient dimension must be >= 2, got {self.n}")
        if not abs(self.gamma) <= math.pi / 2 + 1e-12:
            raise ValueError(f"|gamma| must be <= pi/2, got {self.gamma}")
        if not -1e-12 <= self.theta <= math.pi / 2 - abs(self.gamma) + 1e-12:
            raise ValueError(
                f"theta must lie in [0, pi/2 - |gamma|], got theta={self.theta} "
                f"with gamma={self.gamma}"
            )

    @property
    def normals(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return (
            unit_direction(self.gamma + self.theta, self.n),
            unit_direction(self.gamma - self.theta, self.n),
        )

    @property
    def aperture(self) -> float:
        """Interior opening angle, pi - 2*theta."""
        return math.pi - 2.0 * self.theta


def sharp_wedge(delta: float, n: int = 3) -> Wedge:
    """The near-degenerate wedge of half-width delta around the downward ray."""
    if not 0.0 <= delta <= math.pi / 2:
        raise ValueError(f"delta must lie in [0, pi/2], got {delta}")
    return Wedge(0.0, math.pi / 2 - delta, n)


def wedge_signed_distance(w: Wedge, x) -> NDArray[np.float64] | float:
    """Signed Euclidean distance to the wedge boundary, negative inside.

    Accepts a single point or an array of shape (..., n); only the last two
    coordinates enter.  Interior points report minus the distance to the
    nearer face, exterior points the distance to the set (nearest face
    half-line, or the apex when both perpendicular feet miss).
    """
    p = np.asarray(x, dtype=float)
    scalar = p.ndim == 1
    if p.shape[-1] != w.n:
        raise ValueError(f"points have dimension {p.shape[-1]}, wedge expects {w.n}")
    s = p[..., -2]
    t = p[..., -1]
    a1 = w.gamma + w.theta
    a2 = w.gamma - w.theta
    d1 = math.sin(a1) * s + math.cos(a1) * t
    d2 = math.sin(a2) * s + math.cos(a2) * t
    inside = (d1 <= 0.0) & (d2 <= 0.0)
    c2t = math.cos(2.0 * w.theta)
    # perpendicular foot on a face stays on that half-line iff the other
    # half-space constraint still holds at the foot
    on1 = (d1 >= 0.0) & (d2 - d1 * c2t <= 0.0)
    on2 = (d2 >= 0.0) & (d1 - d2 * c2t <= 0.0)
    rad = np.hypot(s, t)
    cand1 = np.where(on1, d1, np.inf)
    cand2 = np.where(on2, d2, np.inf)
    outside = np.minimum(np.minimum(cand1, cand2), rad)
    sd = np.where(inside, np.maximum(d1, d2), outside)
    return float(sd) if scalar else sd


def wedge_contains(w: Wedge, x) -> NDArray[np.bool_] | bool:
    """Membership in the closed wedge (both face constraints nonpositive)."""
    p = np.asarray(x, dtype=float)
    scalar = p.ndim == 1
    if p.shape[-1] != w.n:
        raise ValueError(f"points have dimension {p.shape[-1]}, wedge expects {w.n}")
    s = p[..., -2]
    t = p[..., -1]
    a1 = w.gamma + w.theta
    a2 = w.gamma - w.theta
    d1 = math.sin(a1) * s + math.cos(a1) * t
    d2 = math.sin(a2) * s + math.cos(a2) * t
    ok = (d1 <= 1e-15) & (d2 <= 1e-15)
    return bool(ok) if scalar else ok


@dataclass(frozen=True)
class ClosenessReport:
    """Two-sided sandwich defect of a sampled set against a wedge.

    ``outer`` is how far sampled member points poke outside the wedge,
    ``inner`` how deep sampled complement points cut into it; ``epsilon``
    is their maximum.  epsilon = 0 exactly when the sampled set and the
    wedge agree on the sample.
    """

    epsilon: float
    outer: float
    inner: float
    radius: float


def closeness(points, inside, w: Wedge, r: float) -> ClosenessReport:
    """Measure the sandwich defect of an indicator sample against ``w`` in B_r.

    ``points`` is an (N, n) array, ``inside`` a boolean mask saying which
    points belong to the sampled set.  Points outside B_r are ignored; the
    caller is responsible for sampling B_r densely enough for the answer to
    mean anything.
    """
    pts = np.asarray(points, dtype=float)
    mask = np.asarray(inside, dtype=bool)
    if pts.ndim != 2 or pts.shape[1] != w.n:
        raise ValueError(f"points must have shape (N, {w.n})")
    if mask.shape != (pts.shape[0],):
        raise ValueError("inside mask must match points")
    if r <= 0:
        raise RangeError(f"radius must be positive, got {r}")
    in_ball = np.einsum("ij,ij->i", pts, pts) <= r * r * (1 + 1e-12)
    if not in_ball.any():
        raise RangeError("sample does not meet B_r")
    sd = wedge_signed_distance(w, pts[in_ball])
    m = mask[in_ball]
    outer = float(np.max(sd[m], initial=0.0))
    inner = float(np.max(-sd[~m], initial=0.0))
    outer = max(outer, 0.0)
    inner = max(inner, 0.0)
    return ClosenessReport(max(outer, inner), outer, inner, float(r))


def boundary_defect(w: Wedge, points, r: float) -> float:
    """Largest |signed distance| from a boundary point cloud to the wedge faces.

    This is the one-sided Hausdorff defect used when only boundary samples
    (not an indicator) are available; on exact wedge boundaries it vanishes.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != w.n:
        raise ValueError(f"points must have shape (N, {w.n})")
    in_ball = np.einsum("ij,ij->i", pts, pts) <= r * r * (1 + 1e-12)
    if not in_ball.any():
        raise RangeError("cloud does not meet B_r")
    return float(np.max(np.abs(wedge_signed_distance(w, pts[in_ball]))))


def _feasible_theta(gamma: float, theta: float) -> float:
    hi = math.pi / 2 - abs(gamma)
    return min(max(theta, 0.0), max(hi, 0.0))


def fit_wedge(points, r: float, coarse: int = 65, refine: int = 20) -> tuple[Wedge, float]:
    """Best-fitting wedge for a boundary point cloud inside B_r.

    Scans a ``coarse`` x ``coarse`` lattice over the admissible (gamma,
    theta) triangle, then runs ``refine`` rounds of alternating golden
    section around the incumbent.  The default odd lattice count puts
    gamma = 0 and the dyadic angles k*pi/128 on the scan exactly, and the
    refinement keeps the incumbent unless strictly better, so clouds drawn
    from such a wedge fit with zero defect.  Ties on the lattice break
    toward the smallest theta, then the smallest |gamma|, so degenerate
    clouds (a hyperplane seen edge-on) resolve deterministically.  Returns
    the wedge and its residual defect.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError("need a nonempty (N, n) point cloud")
    n = pts.shape[1]
    in_ball = np.einsum("ij,ij->i", pts, pts) <= r * r * (1 + 1e-12)
    if not in_ball.any():
        raise RangeError("cloud does not meet B_r")
    cloud = pts[in_ball]
    if cloud.shape[0] > 4096:
        stride = int(np.ceil(cloud.shape[0] / 4096))
        cloud = cloud[::stride]
    s = cloud[:, -2]
    t = cloud[:, -1]
    rad = np.hypot(s, t)

    def defect(gamma: float, theta: float) -> float:
        a1 = gamma + theta
        a2 = gamma - theta
        d1 = math.sin(a1) * s + math.cos(a1) * t
        d2 = math.sin(a2) * s + math.cos(a2) * t
        inside = (d1 <= 0.0) & (d2 <= 0.0)
        c2t = math.cos(2.0 * theta)
        on1 = (d1 >= 0.0) & (d2 - d1 * c2t <= 0.0)
        on2 = (d2 >= 0.0) & (d1 - d2 * c2t <= 0.0)
        cand1 = np.where(on1, d1, np.inf)
        cand2 = np.where(on2, d2, np.inf)
        sd = np.where(inside, np.maximum(d1, d2), np.minimum(np.minimum(cand1, cand2), rad))
        return float(np.max(np.abs(sd)))

    gammas = np.linspace(-math.pi / 2, math.pi / 2, coarse)
    thetas = np.linspace(0.0, math.pi / 2, coarse)
    best = (math.inf, math.inf, math.inf, 0.0, 0.0)  # (eps, theta, |gamma|, gamma, theta)
    for g in gammas:
        th_hi = math.pi / 2 - abs(g)
        for th in thetas:
            if th > th_hi + 1e-12:
                break
            e = defect(g, min(th, th_hi))
            key = (round(e / 1e-12) * 1e-12, th, abs(g))
            if key < best[:3]:
                best = (*key, g, min(th, th_hi))
    eps_best, _, _, g_best, th_best = best

    dg = gammas[1] - gammas[0]
    dt = thetas[1] - thetas[0]
    for _ in range(refine):
        g_lo = max(g_best - dg, -math.pi / 2)
        g_hi = min(g_best + dg, math.pi / 2)
        g_new, e_new = _golden_min(lambda g: defect(g, _feasible_theta(g, th_best)), g_lo, g_hi)
        if e_new < eps_best:
            eps_best, g_best = e_new, g_new
            th_best = _feasible_theta(g_best, th_best)
        th_cap = math.pi / 2 - abs(g_best)
        t_lo = max(th_best - dt, 0.0)
        t_hi = min(th_best + dt, th_cap)
        t_new, e_new = _golden_min(lambda th: defect(g_best, th), t_lo, t_hi)
        if e_new < eps_best:
            eps_best, th_best = e_new, t_new
        dg *= _INVPHI
        dt *= _INVPHI

    return Wedge(g_best, _feasible_theta(g_best, th_best), n), eps_best


def _golden_min(f, a: float, b: float, iters: int = 10) -> tuple[float, float]:
    if b <= a:
        return a, f(a)
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)
