"""Exact planar minimizers around a radial thin obstacle.

The domain is the closed unit disk.  A region E is described by its
boundary trace: a path from circle point ``a`` to circle point ``b``; the
declared side says which of the two circle arcs between them belongs to E,
and E is the region enclosed by trace plus declared arc.  The obstacle is
the radial segment from the center to the circle at angle ``obstacle_deg``;
a thickening half-angle ``delta > 0`` turns it into a circular sector.
Feasible regions contain the closed obstacle.

Minimizers of trace length are taut: they bend only at the obstacle apex
(the center), at the sector feet on the circle, or traverse the circle arc
between the feet when the obstacle points away from the declared side.
That makes exhaustive search over a fixed family of tagged vertex
sequences exact, and the tags double as symbolic coordinates: evaluating
them at a different thickening gives the vertexwise limit of minimizers
for free.  Trace length counts circle-arc pieces (the boundary of E along
the sector mouth), which is what makes length monotone in the thickening.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigError, RangeError

_TWO_PI = 2.0 * math.pi


def _cross2(u, v) -> float:
    """Scalar cross product of two planar vectors."""
    return float(u[0] * v[1] - u[1] * v[0])


def _norm_ang(phi: float) -> float:
    return phi % _TWO_PI


def _pt(phi: float) -> np.ndarray:
    return np.array([math.cos(phi), math.sin(phi)])


def _ccw_span(start: float, end: float) -> float:
    return (end - start) % _TWO_PI


def _in_ccw_arc(phi: float, start: float, end: float, tol: float = 1e-12) -> bool:
    return _ccw_span(start, phi) <= _ccw_span(start, end) + tol


def _strictly_in_ccw_arc(phi: float, start: float, end: float, tol: float = 1e-9) -> bool:
    s = _ccw_span(start, phi)
    return tol < s < _ccw_span(start, end) - tol


@dataclass(frozen=True)
class PlanarConfig:
    """Boundary trace endpoints, declared side, and obstacle geometry.

    ``side`` names the circle arc belonging to E: "ccw" walks from a
    counterclockwise to b, "cw" clockwise.  ``delta`` is the obstacle
    half-angle in radians (0 = bare segment).
    """

    a_deg: float
    b_deg: float
    side: str = "ccw"
    obstacle_deg: float = -90.0
    delta: float = 0.0

    def __post_init__(self) -> None:
        if self.side not in ("ccw", "cw"):
            raise ConfigError(f"side must be 'ccw' or 'cw', got {self.side!r}")
        if not (0.0 <= self.delta < math.pi / 2):
            raise ConfigError(f"delta must lie in [0, pi/2), got {self.delta}")
        if abs((self.a_deg - self.b_deg) % 360.0) < 1e-9 or abs(
            (self.b_deg - self.a_deg) % 360.0
        ) < 1e-9:
            raise ConfigError("trace endpoints must be distinct")

    @property
    def a_rad(self) -> float:
        return _norm_ang(math.radians(self.a_deg))

    @property
    def b_rad(self) -> float:
        return _norm_ang(math.radians(self.b_deg))

    @property
    def obs_rad(self) -> float:
        return _norm_ang(math.radians(self.obstacle_deg))

    def in_e_arc(self, phi: float, tol: float = 1e-12) -> bool:
        if self.side == "ccw":
            return _in_ccw_arc(phi, self.a_rad, self.b_rad, tol)
        return _in_ccw_arc(phi, self.b_rad, self.a_rad, tol)

    def strictly_in_e_arc(self, phi: float) -> bool:
        if self.side == "ccw":
            return _strictly_in_ccw_arc(phi, self.a_rad, self.b_rad)
        return _strictly_in_ccw_arc(phi, self.b_rad, self.a_rad)


def _tag_point(tag: str, config: PlanarConfig, delta: float) -> np.ndarray:
    obs = config.obs_rad
    if tag == "a":
        return _pt(config.a_rad)
    if tag == "b":
        return _pt(config.b_rad)
    if tag == "apex":
        return np.zeros(2)
    if tag == "foot":
        return _pt(obs)
    if tag == "foot_ccw":
        return _pt(obs + delta)
    if tag == "foot_cw":
        return _pt(obs - delta)
    raise ValueError(f"unknown vertex tag {tag!r}")


@dataclass(frozen=True)
class PlanarSet:
    """Region of the closed unit disk given by its boundary trace.

    ``vertices`` runs from a to b; connectors are straight segments except
    at indices in ``arc_after``, where the connector follows the unit
    circle along the minor arc.  ``side`` declares E's circle arc as in
    PlanarConfig.  ``full_disk`` encodes E = whole disk (empty trace).
    """

    vertices: tuple[tuple[float, float], ...]
    arc_after: tuple[int, ...] = ()
    side: str = "ccw"
    tags: tuple[str, ...] = ()
    full_disk: bool = False

    def __post_init__(self) -> None:
        if self.side not in ("ccw", "cw"):
            raise ConfigError(f"side must be 'ccw' or 'cw', got {self.side!r}")
        if self.full_disk:
            if self.vertices:
                raise ConfigError("a full-disk region has no boundary trace")
            return
        if len(self.vertices) < 2:
            raise ConfigError("a boundary trace needs at least two vertices")
        if self.tags and len(self.tags) != len(self.vertices):
            raise ConfigError("tags must parallel vertices")
        for i in (0, -1):
            if abs(np.hypot(*self.vertices[i]) - 1.0) > 1e-9:
                raise ConfigError("trace endpoints must lie on the unit circle")
        for i in self.arc_after:
            if not 0 <= i < len(self.vertices) - 1:
                raise ConfigError(f"arc connector index {i} out of range")
            for j in (i, i + 1):
                if abs(np.hypot(*self.vertices[j]) - 1.0) > 1e-9:
                    raise ConfigError("arc connectors must join circle points")

    @property
    def a_angle(self) -> float:
        return _norm_ang(math.atan2(self.vertices[0][1], self.vertices[0][0]))

    @property
    def b_angle(self) -> float:
        return _norm_ang(math.atan2(self.vertices[-1][1], self.vertices[-1][0]))

    def pieces(self) -> list[tuple]:
        """Trace pieces in order: ("seg", p, q) or ("arc", phi0, signed_span)."""
        out: list[tuple] = []
        arcs = set(self.arc_after)
        for i in range(len(self.vertices) - 1):
            p = np.asarray(self.vertices[i], dtype=float)
            q = np.asarray(self.vertices[i + 1], dtype=float)
            if i in arcs:
                phi0 = math.atan2(p[1], p[0])
                phi1 = math.atan2(q[1], q[0])
                span = (phi1 - phi0 + math.pi) % _TWO_PI - math.pi  # minor arc
                out.append(("arc", phi0, span))
            else:
                out.append(("seg", p, q))
        return out

    def closed_pieces(self) -> list[tuple]:
        """Trace plus the declared circle arc traversed from b back to a."""
        out = self.pieces()
        if self.side == "ccw":
            out.append(("arc", self.b_angle, -_ccw_span(self.a_angle, self.b_angle)))
        else:
            out.append(("arc", self.b_angle, _ccw_span(self.b_angle, self.a_angle)))
        return out

    @property
    def length(self) -> float:
        """Total trace length; circle-arc pieces count their arc length."""
        if self.full_disk:
            return 0.0
        total = 0.0
        for piece in self.pieces():
            if piece[0] == "seg":
                total += float(np.hypot(*(piece[2] - piece[1])))
            else:
                total += abs(piece[2])
        return total

    def in_e_arc(self, phi: float, tol: float = 1e-12) -> bool:
        if self.side == "ccw":
            return _in_ccw_arc(phi, self.a_angle, self.b_angle, tol)
        return _in_ccw_arc(phi, self.b_angle, self.a_angle, tol)


def _seg_point_distance(p: np.ndarray, q: np.ndarray, x: np.ndarray) -> float:
    v = q - p
    vv = float(v @ v)
    if vv == 0.0:
        return float(np.hypot(*(x - p)))
    t = float((x - p) @ v) / vv
    t = min(max(t, 0.0), 1.0)
    return float(np.hypot(*(x - (p + t * v))))


def _arc_point_distance(phi0: float, span: float, x: np.ndarray) -> float:
    r = float(np.hypot(*x))
    ang = math.atan2(x[1], x[0])
    if span >= 0:
        inside = _in_ccw_arc(ang, phi0, phi0 + span)
    else:
        inside = _in_ccw_arc(ang, phi0 + span, phi0)
    if inside and r > 0:
        return abs(r - 1.0)
    d0 = float(np.hypot(*(x - _pt(phi0))))
    d1 = float(np.hypot(*(x - _pt(phi0 + span))))
    return min(d0, d1)


def _piece_distance(piece: tuple, x: np.ndarray) -> float:
    if piece[0] == "seg":
        return _seg_point_distance(piece[1], piece[2], x)
    return _arc_point_distance(piece[1], piece[2], x)


def _seg_subtended(p: np.ndarray, q: np.ndarray, x: np.ndarray) -> float:
    u = p - x
    v = q - x
    return math.atan2(float(u[0] * v[1] - u[1] * v[0]), float(u @ v))


def _arc_subtended(phi0: float, span: float, x: np.ndarray) -> float:
    """Angle swept at an interior point x while walking a unit-circle arc.

    For |x| < 1 the bearing from x to the moving arc point is strictly
    monotone in the arc parameter, so the total sweep is the principal
    angle difference lifted into [0, 2pi) (ccw) or (-2pi, 0] (cw).  This is
    exact; no subdivision needed.
    """
    if span == 0.0:
        return 0.0
    q0 = _pt(phi0) - x
    q1 = _pt(phi0 + span) - x
    raw = math.atan2(q1[1], q1[0]) - math.atan2(q0[1], q0[0])
    if span > 0:
        return raw % _TWO_PI
    return -((-raw) % _TWO_PI)


def locate_point(pieces: list[tuple], x, tol: float = 1e-9) -> str:
    """Classify x against the closed curve: "boundary", "inside", "outside".

    x must lie strictly inside the unit circle for the arc winding formula
    to apply; boundary proximity is decided first with tolerance tol.
    """
    x = np.asarray(x, dtype=float)
    if min(_piece_distance(p, x) for p in pieces) <= tol:
        return "boundary"
    if float(np.hypot(*x)) >= 1.0:
        return "outside"
    w = 0.0
    for piece in pieces:
        if piece[0] == "seg":
            w += _seg_subtended(piece[1], piece[2], x)
        else:
            w += _arc_subtended(piece[1], piece[2], x)
    return "inside" if abs(w) > math.pi else "outside"


def point_in_region(s: PlanarSet, x, tol: float = 1e-9) -> str:
    """Classify a point of the open disk against E: inside / boundary / outside."""
    x = np.asarray(x, dtype=float)
    if s.full_disk:
        return "inside" if float(np.hypot(*x)) < 1.0 - tol else "boundary"
    return locate_point(s.closed_pieces(), x, tol)


def _segs_properly_cross(p, q, r, s, eps: float = 1e-12) -> bool:
    d1 = _cross2(s - r, p - r)
    d2 = _cross2(s - r, q - r)
    d3 = _cross2(q - p, r - p)
    d4 = _cross2(q - p, s - p)
    return ((d1 > eps and d2 < -eps) or (d1 < -eps and d2 > eps)) and (
        (d3 > eps and d4 < -eps) or (d3 < -eps and d4 > eps)
    )


def _seg_crosses_cone(p, q, obs: float, delta: float, eps: float = 1e-12) -> bool:
    """Does the open segment meet the open cone of half-angle delta about obs?"""
    m1 = _pt(obs - (math.pi / 2 - delta))
    m2 = _pt(obs + (math.pi / 2 - delta))
    lo, hi = 0.0, 1.0
    for m in (m1, m2):
        f0 = float(p @ m)
        f1 = float(q @ m)
        den = f1 - f0
        # need f0 + t*den > 0
        if abs(den) < 1e-15:
            if f0 <= eps:
                return False
        elif den > 0:
            lo = max(lo, (eps - f0) / den)
        else:
            hi = min(hi, (eps - f0) / den)
    return hi - lo > eps


def _seg_crosses_slit(p, q, obs: float) -> bool:
    return _segs_properly_cross(
        np.asarray(p, float), np.asarray(q, float), np.zeros(2), _pt(obs)
    )


def _candidates(c: PlanarConfig) -> list[tuple[list[str], set[int]]]:
    if c.delta == 0.0:
        return [
            (["a", "b"], set()),
            (["a", "foot", "b"], set()),
            (["a", "apex", "b"], set()),
            (["a", "apex", "foot", "b"], set()),
            (["a", "foot", "apex", "b"], set()),
        ]
    out: list[tuple[list[str], set[int]]] = [
        (["a", "b"], set()),
        (["a", "apex", "b"], set()),
    ]
    for t1, t2 in (("foot_ccw", "foot_cw"), ("foot_cw", "foot_ccw")):
        out.append((["a", t1, t2, "b"], {1}))
        out.append((["a", "apex", t1, t2, "b"], {2}))
        out.append((["a", t1, t2, "apex", "b"], {1}))
    return out


def _collapse(verts: list[np.ndarray], tags: list[str], arcs: set[int]):
    """Merge consecutive coincident vertices, remapping arc connector indices."""
    keep_v: list[np.ndarray] = [verts[0]]
    keep_t: list[str] = [tags[0]]
    new_arcs: set[int] = set()
    for i in range(1, len(verts)):
        if float(np.hypot(*(verts[i] - keep_v[-1]))) <= 1e-12:
            continue
        keep_v.append(verts[i])
        keep_t.append(tags[i])
    # arc connectors survive only between vertices that both survived and
    # remain adjacent; recompute by matching original arc endpoints
    for i in arcs:
        p, q = verts[i], verts[i + 1]
        for j in range(len(keep_v) - 1):
            if (
                float(np.hypot(*(keep_v[j] - p))) <= 1e-12
                and float(np.hypot(*(keep_v[j + 1] - q))) <= 1e-12
            ):
                new_arcs.add(j)
    return keep_v, keep_t, new_arcs


def _feasible(c: PlanarConfig, verts: list[np.ndarray], tags: list[str], arcs: set[int]) -> bool:
    obs, delta = c.obs_rad, c.delta
    pieces: list[tuple] = []
    for i in range(len(verts) - 1):
        if i in arcs:
            phi0 = math.atan2(verts[i][1], verts[i][0])
            phi1 = math.atan2(verts[i + 1][1], verts[i + 1][0])
            span = (phi1 - phi0 + math.pi) % _TWO_PI - math.pi
            pieces.append(("arc", phi0, span))
        else:
            pieces.append(("seg", verts[i], verts[i + 1]))

    # obstacle crossings
    for piece in pieces:
        if piece[0] != "seg":
            continue
        if delta == 0.0:
            if _seg_crosses_slit(piece[1], piece[2], obs):
                return False
        elif _seg_crosses_cone(piece[1], piece[2], obs, delta):
            return False

    # simplicity: non-adjacent segment pieces must not properly cross
    segs = [p for p in pieces if p[0] == "seg"]
    for i in range(len(segs)):
        for j in range(i + 2, len(segs)):
            if _segs_properly_cross(segs[i][1], segs[i][2], segs[j][1], segs[j][2]):
                return False

    # interior circle vertices may not sit strictly inside the declared arc
    # (the closed curve would pass through the same circle point twice)
    for v in verts[1:-1]:
        if abs(float(np.hypot(*v)) - 1.0) <= 1e-9:
            phi = math.atan2(v[1], v[0])
            if c.strictly_in_e_arc(phi):
                return False

    # the obstacle's circle contact must belong to the closure of E
    if delta == 0.0:
        foot_ok = c.in_e_arc(obs) or any(t == "foot" for t in tags)
    else:
        traversed = bool(arcs)
        if traversed:
            # the traversed connector covers the whole sector mouth, which
            # must lie outside the open declared arc (checked above for the
            # feet; check the midpoint too)
            foot_ok = not c.strictly_in_e_arc(obs)
        else:
            foot_ok = all(c.in_e_arc(phi) for phi in (obs - delta, obs, obs + delta))
    if not foot_ok:
        return False

    # apex containment
    if any(t == "apex" for t in tags):
        return True
    ps = PlanarSet(
        vertices=tuple(tuple(v) for v in verts),
        arc_after=tuple(sorted(arcs)),
        side=c.side,
        tags=tuple(tags),
    )
    return locate_point(ps.closed_pieces(), np.zeros(2)) in ("inside", "boundary")


def taut_minimizer(c: PlanarConfig) -> PlanarSet:
    """Shortest feasible boundary trace for a planar obstacle configuration.

    Exhausts the taut vertex family {a, b, apex, sector feet} with optional
    traversal of the sector mouth; feasibility means the declared region
    contains the closed obstacle and no piece crosses its interior.  Ties
    break by fixed candidate precedence (fewest bends first), which among
    equal-length traces differ only by null sets of the region.
    """
    if c.delta > 0.0:
        for phi in (c.a_rad, c.b_rad):
            if _strictly_in_ccw_arc(phi, c.obs_rad - c.delta, c.obs_rad + c.delta):
                raise ConfigError(
                    "a trace endpoint lies inside the thickened obstacle mouth"
                )
    best: tuple[float, int] | None = None
    best_set: PlanarSet | None = None
    for idx, (tag_seq, arcs) in enumerate(_candidates(c)):
        verts = [_tag_point(t, c, c.delta) for t in tag_seq]
        verts, tags, arcs2 = _collapse(verts, list(tag_seq), arcs)
        if len(verts) < 2:
            continue
        if not _feasible(c, verts, tags, arcs2):
            continue
        ps = PlanarSet(
            vertices=tuple(tuple(v) for v in verts),
            arc_after=tuple(sorted(arcs2)),
            side=c.side,
            tags=tuple(tags),
        )
        key = (round(ps.length / 1e-12) * 1e-12, idx)
        if best is None or key < best:
            best = key
            best_set = ps
    if best_set is None:
        raise ConfigError(
            "no taut trace can enclose the obstacle on the declared side"
        )
    return best_set


def degiorgi_perimeter(s: PlanarSet, obstacle_deg: float = -90.0) -> float:
    """Trace length plus twice the obstacle length not covered by the region.

    The obstacle is the unit radial segment at ``obstacle_deg``.  Coverage
    is computed exactly: the segment is split at trace intersections and
    each sub-interval is classified by a winding test at its midpoint
    (boundary contact counts as covered).
    """
    e = _pt(_norm_ang(math.radians(obstacle_deg)))
    if s.full_disk:
        return 0.0
    pieces = s.closed_pieces()
    cuts = {0.0, 1.0}
    for piece in s.pieces():
        if piece[0] != "seg":
            continue
        p, q = piece[1], piece[2]
        v = q - p
        den = _cross2(v, e)
        if abs(den) > 1e-14:
            u = _cross2(p, e) / den  # p + u v lies on the obstacle line
            if -1e-12 <= u <= 1.0 + 1e-12:
                t = float((p + min(max(u, 0.0), 1.0) * v) @ e)
                if 0.0 < t < 1.0:
                    cuts.add(t)
        else:
            # piece parallel to the obstacle ray: if collinear, its endpoint
            # projections bound a covered run
            if abs(_cross2(p, e)) <= 1e-12:
                for w in (p, q):
                    t = float(w @ e)
                    if 0.0 < t < 1.0:
                        cuts.add(t)
    grid = sorted(cuts)
    covered = 0.0
    for t0, t1 in zip(grid[:-1], grid[1:]):
        mid = 0.5 * (t0 + t1) * e
        if locate_point(pieces, mid) in ("inside", "boundary"):
            covered += t1 - t0
    return s.length + 2.0 * (1.0 - covered)


def cone_check(s: PlanarSet, tol: float = 1e-9) -> bool:
    """True iff every trace piece is a segment whose support line meets the
    origin within tol.  Circle-arc pieces disqualify immediately (no cone
    boundary contains one)."""
    if s.full_disk:
        return False
    for piece in s.pieces():
        if piece[0] != "seg":
            return False
        p, q = piece[1], piece[2]
        v = q - p
        L = float(np.hypot(*v))
        if L <= tol:
            continue
        if abs(_cross2(p, v)) / L > tol:
            return False
    return True


@dataclass(frozen=True)
class DeltaLimitReport:
    """Vertexwise limit of minimizers along a decreasing thickening sequence.

    ``rows`` holds (delta, trace length, max vertex deviation from the
    limit); ``consistent`` records whether every thickening produced the
    same tagged vertex sequence, which is what makes the symbolic limit
    exact.
    """

    limit: PlanarSet
    rows: tuple[tuple[float, float, float], ...]
    consistent: bool


def delta_limit(c: PlanarConfig, deltas) -> DeltaLimitReport:
    """Solve along deltas (strictly decreasing to 0) and form the limit trace.

    Minimizer vertices are tagged symbols (endpoints, apex, sector feet),
    so the limit is the tag sequence of the finest thickening evaluated at
    delta = 0, with coincident vertices merged and degenerate arc
    connectors dropped.
    """
    ds = [float(d) for d in deltas]
    if not ds or any(d <= 0 for d in ds) or any(b >= a for a, b in zip(ds, ds[1:])):
        raise RangeError("deltas must be positive and strictly decreasing")
    runs = []
    for d in ds:
        sol = taut_minimizer(replace(c, delta=d))
        runs.append((d, sol))
    tag_seqs = [sol.tags for _, sol in runs]
    consistent = all(t == tag_seqs[-1] for t in tag_seqs)

    final_tags = tag_seqs[-1]
    # evaluate the winning tags at delta = 0 and merge coincident vertices
    merged = {"foot_ccw": "foot", "foot_cw": "foot"}
    verts0 = [_tag_point(t, c, 0.0) for t in final_tags]
    tags0 = [merged.get(t, t) for t in final_tags]
    v, t, _ = _collapse(verts0, tags0, set())
    limit = PlanarSet(
        vertices=tuple(tuple(p) for p in v),
        arc_after=(),
        side=c.side,
        tags=tuple(t),
    )
    rows = []
    for d, sol in runs:
        dev = 0.0
        for tag in sol.tags:
            dev = max(
                dev, float(np.hypot(*(_tag_point(tag, c, d) - _tag_point(tag, c, 0.0))))
            )
        rows.append((d, sol.length, dev))
    return DeltaLimitReport(limit=limit, rows=tuple(rows), consistent=consistent)


def random_config(seed: int, max_delta: float = 0.2) -> PlanarConfig:
    """Seeded random configuration valid for every thickening up to max_delta.

    Endpoints keep a safety margin away from the obstacle mouth so the
    trace endpoints never fall inside the thickened sector, and the side is
    flipped (or the draw repeated) until the taut problem is solvable both
    at delta = 0 and at delta = max_delta.  Deterministic per seed.
    """
    if not 0.0 <= max_delta < math.pi / 2:
        raise RangeError(f"max_delta must lie in [0, pi/2), got {max_delta}")
    rng = np.random.default_rng(seed)
    margin = max_delta + 0.05
    for _ in range(1000):
        a = float(rng.uniform(0.0, 360.0))
        b = (a + float(rng.uniform(20.0, 340.0))) % 360.0
        side = "ccw" if rng.integers(0, 2) == 0 else "cw"
        obs = -90.0
        ok_margin = True
        for e_deg in (a, b):
            gap = abs((e_deg - obs + 180.0) % 360.0 - 180.0)
            if math.radians(gap) < margin:
                ok_margin = False
        if not ok_margin:
            continue
        for s in (side, "cw" if side == "ccw" else "ccw"):
            cfg = PlanarConfig(a_deg=a, b_deg=b, side=s, obstacle_deg=obs)
            try:
                taut_minimizer(cfg)
                if max_delta > 0.0:
                    taut_minimizer(replace(cfg, delta=max_delta))
            except ConfigError:
                continue
            return cfg
    raise ConfigError(f"no valid random configuration found for seed {seed}")


def sample_boundary(s: PlanarSet, spacing: float) -> np.ndarray:
    """Points along the trace at roughly the given arclength spacing (m, 2)."""
    if spacing <= 0:
        raise RangeError("spacing must be positive")
    pts: list[np.ndarray] = []
    for piece in s.pieces():
        if piece[0] == "seg":
            p, q = piece[1], piece[2]
            L = float(np.hypot(*(q - p)))
            k = max(int(math.ceil(L / spacing)), 1)
            ts = np.linspace(0.0, 1.0, k + 1)
            pts.append(p[None, :] + ts[:, None] * (q - p)[None, :])
        else:
            phi0, span = piece[1], piece[2]
            k = max(int(math.ceil(abs(span) / spacing)), 1)
            phis = phi0 + span * np.linspace(0.0, 1.0, k + 1)
            pts.append(np.stack([np.cos(phis), np.sin(phis)], axis=-1))
    return np.concatenate(pts, axis=0)
