"""Constrained harmonic solver: Laplace equation with a unilateral slice constraint.

The unknown is a lattice field on the box of ``GridSpec``, fixed to given
data at every non-interior node (the collar) and subject to ``u >= psi`` at
interior nodes lying on the constraint slice ``{x_{n-1} = 0}``.  The solver
is projected successive over-relaxation with lexicographic sweeps; for small
grids an exhaustive active-set enumeration solves the same quadratic program
exactly and serves as a cross-check.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from numba import njit

from .errors import GridError, RangeError, SolverError
from .grid import Field, GridSpec, discrete_laplacian

_ENERGY_STRIDE = 50


@dataclass(frozen=True)
class SignoriniProblem:
    """Dirichlet data ``g`` on the collar, obstacle ``psi`` on the slice.

    The constraint acts only at interior slice nodes; ``psi`` is stored as a
    full lattice field but read nowhere else.
    """

    grid: GridSpec
    psi: Field
    g: Field
    tol: float = 1e-8
    max_iters: int = 200_000
    omega: float = 1.5

    def __post_init__(self) -> None:
        if self.psi.grid != self.grid or self.g.grid != self.grid:
            raise GridError("psi and g must live on the problem grid")
        if not (0.0 < self.omega < 2.0):
            raise RangeError(f"relaxation factor must be in (0, 2), got {self.omega}")
        if not (self.tol > 0.0 and math.isfinite(self.tol)):
            raise RangeError(f"tolerance must be positive, got {self.tol}")
        if self.max_iters < 1:
            raise RangeError("max_iters must be at least 1")


@dataclass(frozen=True)
class SolveInfo:
    sweeps: int
    final_update: float
    converged: bool
    energy_history: tuple[tuple[int, float], ...] = field(default=())


@njit(cache=True)
def _psor_chunk_1d(u, interior, constrained, psi, omega, sweeps, tol):
    n0 = u.shape[0]
    delta = 0.0
    done = 0
    for _ in range(sweeps):
        delta = 0.0
        for i in range(1, n0 - 1):
            if not interior[i]:
                continue
            gs = 0.5 * (u[i - 1] + u[i + 1])
            new = u[i] + omega * (gs - u[i])
            if constrained[i] and new < psi[i]:
                new = psi[i]
            d = new - u[i]
            if d < 0.0:
                d = -d
            if d > delta:
                delta = d
            u[i] = new
        done += 1
        if delta < tol:
            break
    return delta, done


@njit(cache=True)
def _psor_chunk_2d(u, interior, constrained, psi, omega, sweeps, tol):
    n0, n1 = u.shape
    delta = 0.0
    done = 0
    for _ in range(sweeps):
        delta = 0.0
        for i in range(1, n0 - 1):
            for j in range(1, n1 - 1):
                if not interior[i, j]:
                    continue
                gs = 0.25 * (u[i - 1, j] + u[i + 1, j] + u[i, j - 1] + u[i, j + 1])
                new = u[i, j] + omega * (gs - u[i, j])
                if constrained[i, j] and new < psi[i, j]:
                    new = psi[i, j]
                d = new - u[i, j]
                if d < 0.0:
                    d = -d
                if d > delta:
                    delta = d
                u[i, j] = new
        done += 1
        if delta < tol:
            break
    return delta, done


def dirichlet_energy(f: Field) -> float:
    """0.5 * h^{d-2} * sum of squared first differences over all lattice edges."""
    vals = f.values
    d = f.grid.d
    total = 0.0
    for ax in range(d):
        dv = np.diff(vals, axis=ax)
        total += float(np.sum(dv * dv))
    return 0.5 * f.grid.h ** (d - 2) * total


def initial_iterate(problem: SignoriniProblem) -> np.ndarray:
    """Data field projected onto the constraint set (deterministic warm start)."""
    u = problem.g.values.copy()
    sl = problem.grid.slice_mask
    u[sl] = np.maximum(u[sl], problem.psi.values[sl])
    return u


def solve_signorini(problem: SignoriniProblem, *, return_info: bool = False):
    """Projected SOR for the slice-constrained Laplace problem.

    Sweeps run in lexicographic node order; each visited interior node gets
    the over-relaxed Gauss-Seidel value, clipped from below by the obstacle
    at constrained nodes.  Iteration stops when the largest update in a full
    sweep drops below ``problem.tol``; exceeding ``max_iters`` sweeps raises
    ``SolverError`` with the last update size attached.
    """
    grid = problem.grid
    if grid.d not in (1, 2):
        raise GridError("constrained solves support ambient dimension 2 or 3 only")
    u = initial_iterate(problem)
    interior = grid.interior_mask
    constrained = grid.slice_mask
    psi = problem.psi.values
    kernel = _psor_chunk_1d if grid.d == 1 else _psor_chunk_2d
    history: list[tuple[int, float]] = []
    sweeps_done = 0
    delta = math.inf
    converged = False
    history.append((0, dirichlet_energy(Field(grid, u))))
    while sweeps_done < problem.max_iters:
        chunk = min(_ENERGY_STRIDE, problem.max_iters - sweeps_done)
        delta, done = kernel(
            u, interior, constrained, psi, problem.omega, chunk, problem.tol
        )
        sweeps_done += done
        history.append((sweeps_done, dirichlet_energy(Field(grid, u))))
        if delta < problem.tol:
            converged = True
            break
    if not converged:
        err = SolverError(
            f"projected SOR did not reach tol={problem.tol} within "
            f"{problem.max_iters} sweeps (last update {delta:.3e})"
        )
        err.residual = delta
        raise err
    result = Field(grid, u)
    if return_info:
        info = SolveInfo(
            sweeps=sweeps_done,
            final_update=delta,
            converged=True,
            energy_history=tuple(history),
        )
        return result, info
    return result


@dataclass(frozen=True, eq=False)
class ComplementarityReport:
    """Discrete first-order conditions evaluated on a solved field.

    ``max_kkt_residual``   largest |Laplacian| at interior nodes not in contact
    ``max_contact_excess`` largest positive Laplacian at contact nodes
                           (a valid solution has non-positive values there)
    ``min_slack``          smallest u - psi over constrained nodes
    """

    contact_count: int
    constrained_count: int
    contact_fraction: float
    max_kkt_residual: float
    max_contact_excess: float
    min_slack: float
    contact_mask: np.ndarray


def contact_set(u: Field, psi: Field, contact_tol: float = 1e-10) -> np.ndarray:
    """Boolean lattice mask of constrained nodes where the obstacle is attained."""
    grid = u.grid
    return grid.slice_mask & (u.values - psi.values <= contact_tol)


def complementarity_report(
    u: Field, psi: Field, contact_tol: float = 1e-10
) -> ComplementarityReport:
    grid = u.grid
    if psi.grid != grid:
        raise GridError("fields live on different grids")
    contact = contact_set(u, psi, contact_tol)
    constrained = grid.slice_mask
    lap = discrete_laplacian(u).values
    off = grid.interior_mask & ~contact
    max_res = float(np.max(np.abs(lap[off]))) if off.any() else 0.0
    excess = float(np.max(lap[contact])) if contact.any() else -math.inf
    slack = float(np.min((u.values - psi.values)[constrained]))
    n_constrained = int(constrained.sum())
    n_contact = int(contact.sum())
    return ComplementarityReport(
        contact_count=n_contact,
        constrained_count=n_constrained,
        contact_fraction=n_contact / n_constrained,
        max_kkt_residual=max_res,
        max_contact_excess=excess,
        min_slack=slack,
        contact_mask=contact,
    )


def free_boundary(u: Field, psi: Field, contact_tol: float = 1e-10) -> np.ndarray:
    """Coordinates of contact nodes adjacent, within the slice, to non-contact
    constrained nodes.

    Returned as an (m, n-1) array sorted lexicographically.  In ambient
    dimension 2 the slice is a single node and the result is always empty; a
    fully contacted slice likewise has no free boundary.
    """
    grid = u.grid
    contact = contact_set(u, psi, contact_tol)
    constrained = grid.slice_mask
    edge = np.zeros_like(contact)
    for ax in range(grid.d - 1):
        for shift in (1, -1):
            nb_contact = np.roll(contact, shift, axis=ax)
            nb_constrained = np.roll(constrained, shift, axis=ax)
            # rolled wrap-around rows are never constrained (outside the ball)
            edge |= contact & nb_constrained & ~nb_contact
    idx = np.argwhere(edge)
    coords = (idx - grid.origin_index) * grid.h
    order = np.lexsort(coords.T[::-1])
    return coords[order]


@dataclass(frozen=True)
class ExponentFit:
    """Growth rate of the deviation from a tangent plane, with its evidence."""

    kappa: float
    radii: tuple[float, ...]
    oscillations: tuple[float, ...]
    plane: tuple[float, ...]
    annulus_nodes: int


def exponent_fit(
    u: Field,
    psi: Field,
    x0,
    *,
    contact_tol: float = 1e-10,
) -> ExponentFit:
    """Fit the growth exponent of u around a slice point x0.

    A single affine plane is least-squares fitted to u on the annulus
    4h <= |x - x0| <= 8h with contact nodes removed: the contacted part of
    the slice carries a gradient kink, so only the non-contact side informs
    the tangent plane.  The oscillation osc(r) = max - min of (u - plane)
    over the full ball B_r(x0) is then measured at dyadic radii r = 2^{-k}
    down to 4h, and kappa is the least-squares slope of log osc vs log r.

    Requires the first eight dyadic balls B_{2^-k}(x0), k = 1..8, to sit
    inside the domain box, and at least two dyadic radii of at least 4h
    (RangeError otherwise).  A field that is affine near x0 has zero
    oscillation at every scale; kappa is then reported as +inf.
    """
    grid = u.grid
    if psi.grid != grid:
        raise GridError("fields live on different grids")
    x0 = np.asarray(x0, dtype=float)
    if x0.shape != (grid.d,):
        raise RangeError(f"x0 must have {grid.d} coordinates")
    h = grid.h
    axis_max = grid.axis_coords[-1]

    if not np.all(np.abs(x0) + 0.5 <= axis_max + 1e-12):
        raise RangeError(
            f"fewer than 8 dyadic balls around {x0.tolist()} fit inside the domain"
        )
    radii = []
    k = 1
    while 2.0 ** (-k) >= 4 * h - 1e-12:
        radii.append(2.0 ** (-k))
        k += 1
    if len(radii) < 2:
        raise RangeError(
            f"need at least 2 dyadic radii of at least 4h, got {len(radii)}"
        )

    coords = grid.node_coords()
    dx = coords - x0
    dist = np.sqrt(np.sum(dx * dx, axis=-1))

    contact = contact_set(u, psi, contact_tol)
    ann = (dist >= 4 * h - 1e-12) & (dist <= 8 * h + 1e-12) & ~contact
    n_ann = int(ann.sum())
    if n_ann < grid.d + 1:
        raise RangeError("annulus holds too few non-contact nodes for a plane fit")
    plane = _affine_lsq(dx[ann], u.values[ann])
    dev = u.values - (plane[0] + dx @ plane[1:])

    oscs = []
    for r in radii:
        ball = dev[dist <= r + 1e-12]
        oscs.append(float(ball.max() - ball.min()))

    pairs = [(r, o) for r, o in zip(radii, oscs) if o > 1e-13]
    if len(pairs) < 2:
        # affine fields: the deviation vanishes at every scale
        return ExponentFit(
            math.inf, tuple(radii), tuple(oscs), tuple(plane), n_ann
        )
    lr = np.log([p[0] for p in pairs])
    lo = np.log([p[1] for p in pairs])
    kappa = float(np.polyfit(lr, lo, 1)[0])
    return ExponentFit(kappa, tuple(radii), tuple(oscs), tuple(plane), n_ann)


def _affine_lsq(pts: np.ndarray, vals: np.ndarray) -> np.ndarray:
    A = np.hstack([np.ones((len(pts), 1)), pts])
    coeff, *_ = np.linalg.lstsq(A, vals, rcond=None)
    return coeff


def brute_force_signorini(problem: SignoriniProblem, *, max_constrained: int = 20) -> Field:
    """Exact minimizer by enumerating every active set of the constraint.

    Solves the same quadratic program as ``solve_signorini`` — minimize the
    Dirichlet energy over fields matching the collar data with u >= psi on
    the slice — by trying all 2^m subsets S of the m constrained nodes:
    pin u = psi on S via the reduced influence system, then keep the first
    subset whose multipliers are non-negative and whose remaining slice
    values are feasible.  Strict convexity makes that candidate the unique
    minimizer.  Intended for coarse grids; refuses m > ``max_constrained``.
    """
    grid = problem.grid
    slice_nodes = np.argwhere(grid.slice_mask)
    order = np.lexsort(slice_nodes.T[::-1])
    slice_nodes = slice_nodes[order]
    m = len(slice_nodes)
    if m > max_constrained:
        raise RangeError(
            f"{m} constrained nodes exceed the enumeration limit {max_constrained}"
        )

    interior = grid.interior_mask
    idx = np.argwhere(interior)
    n_int = len(idx)
    number = -np.ones(grid.shape, dtype=int)
    number[tuple(idx.T)] = np.arange(n_int)

    scale = grid.h ** (grid.d - 2)
    A = np.zeros((n_int, n_int))
    b = np.zeros(n_int)
    g = problem.g.values
    for p, node in enumerate(idx):
        A[p, p] = 2 * grid.d * scale
        for ax in range(grid.d):
            for shift in (1, -1):
                nb = node.copy()
                nb[ax] += shift
                q = number[tuple(nb)]
                if q >= 0:
                    A[p, q] -= scale
                else:
                    b[p] += scale * g[tuple(nb)]
    s_rows = number[tuple(slice_nodes.T)]
    psi_s = problem.psi.values[tuple(slice_nodes.T)]

    u0 = np.linalg.solve(A, b)
    rhs = np.zeros((n_int, m))
    rhs[s_rows, np.arange(m)] = 1.0
    W = np.linalg.solve(A, rhs)
    G = W[s_rows, :]
    u0_s = u0[s_rows]

    solution = None
    for active in itertools.product((False, True), repeat=m):
        S = np.flatnonzero(active)
        if len(S) == 0:
            u_s = u0_s
            lam = np.zeros(0)
        else:
            lam = np.linalg.solve(G[np.ix_(S, S)], (psi_s - u0_s)[S])
            u_s = u0_s + G[:, S] @ lam
        if np.any(lam < -1e-10):
            continue
        if np.any(u_s < psi_s - 1e-10):
            continue
        u_int = u0 if len(S) == 0 else u0 + W[:, S] @ lam
        if solution is None:
            solution = u_int
        else:
            # degenerate active sets describe the same unique minimizer
            if not np.allclose(solution, u_int, atol=1e-8):
                raise SolverError("active-set enumeration produced conflicting minimizers")
    if solution is None:
        raise SolverError("no active set satisfied the first-order conditions")

    vals = g.copy()
    vals[tuple(idx.T)] = solution
    return Field(grid, vals)
