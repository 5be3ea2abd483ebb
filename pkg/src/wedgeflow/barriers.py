"""Supersolution certificates and the contact dichotomy.

``barrier_phi`` builds the quadratic profile whose graph-curvature is
strictly negative, uniformly on the box; ``barrier_certificate`` verifies
that sign with two independent discretizations of the curvature operator.
``dichotomy`` classifies a solved wedge-data instance: either the slice is
fully contacted inside the half ball and the subgraph is squeezed between
two wedges whose sharpness differs by O(eps), or only the outer sandwich
holds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import wedge_profile
from .errors import RangeError, TheoremViolation
from .grid import Field, GridSpec, mean_curvature, quasilinear_form

BETA_CAP_FACTOR = 10  # admissible range is 0 < beta < 1/(BETA_CAP_FACTOR*(n-2))


def barrier_phi(grid: GridSpec, beta: float) -> Field:
    """Quadratic barrier beta * (|x''|^2 - 2(n-2) * x_{n-1}^2).

    x'' collects the first n-2 domain coordinates and x_{n-1} is the slice
    coordinate.  The continuum Laplacian is the constant -2(n-2)beta, and
    for small beta the full curvature operator inherits a strictly negative
    value; the certificate threshold is -(n-2)*beta, half the Laplacian.
    """
    n = grid.n
    if n < 3:
        raise RangeError("the barrier needs at least one coordinate besides the slice axis")
    cap = 1.0 / (BETA_CAP_FACTOR * (n - 2))
    if not (0.0 < beta < cap):
        raise RangeError(f"beta must lie in (0, {cap:.6g}) for n={n}, got {beta}")

    def fn(*coords):
        s = coords[-1]
        out = -2.0 * (n - 2) * s * s
        for x in coords[:-1]:
            out = out + x * x
        return beta * np.broadcast_to(out, np.broadcast(*coords).shape)

    return grid.evaluate(fn)


@dataclass(frozen=True)
class BarrierReport:
    """Interior maxima of two curvature discretizations versus a threshold.

    ``max_divergence_form``     largest flux-form mean curvature
    ``max_nondivergence_form``  largest value of the expanded quasilinear
                                operator (same sign, different stencil)
    Both must stay at or below ``threshold`` for the certificate to hold.
    """

    threshold: float
    max_divergence_form: float
    max_nondivergence_form: float
    ok: bool

    @property
    def margin(self) -> float:
        return self.threshold - max(self.max_divergence_form, self.max_nondivergence_form)


def verify_supersolution(f: Field, threshold: float) -> BarrierReport:
    """Check that both curvature discretizations stay below ``threshold``
    at every interior node."""
    interior = f.grid.interior_mask
    h_div = float(np.max(mean_curvature(f).values[interior]))
    h_nondiv = float(np.max(quasilinear_form(f).values[interior]))
    ok = h_div <= threshold and h_nondiv <= threshold
    return BarrierReport(
        threshold=float(threshold),
        max_divergence_form=h_div,
        max_nondivergence_form=h_nondiv,
        ok=ok,
    )


def barrier_certificate(grid: GridSpec, beta: float) -> BarrierReport:
    """Certify the quadratic barrier: curvature <= -(n-2)*beta throughout."""
    phi = barrier_phi(grid, beta)
    return verify_supersolution(phi, -(grid.n - 2) * beta)


@dataclass(frozen=True)
class DichotomyResult:
    """Outcome of the contact dichotomy on a solved wedge-data instance.

    ``branch`` is "full_contact" when sharpness >= C0 * eps, else "flat".
    ``lower_defect``: worst failure of the widened wedge (sharpness
    theta + C0*eps) to fit inside the subgraph within the ball — asserted
    small on both branches.  ``upper_defect``: worst failure of the subgraph
    to fit inside the narrowed wedge (theta - C0*eps) — asserted small only
    on the full-contact branch, reported otherwise.  ``contact_fraction``
    counts contacted constrained nodes inside the ball; the full-contact
    branch requires every one of them.
    """

    branch: str
    gamma: float
    theta: float
    eps: float
    c0: float
    radius: float
    tol: float
    lower_defect: float
    upper_defect: float
    contact_fraction: float
    ok: bool
    failures: tuple[str, ...]


def _column_geometry(grid: GridSpec, radius: float):
    coords = grid.node_coords()
    rho2 = np.sum(coords * coords, axis=-1)
    in_disk = rho2 <= radius * radius + 1e-15
    top = np.sqrt(np.maximum(radius * radius - rho2, 0.0))
    s = coords[..., -1]
    return in_disk, top, s


def dichotomy(
    u: Field,
    psi: Field,
    gamma: float,
    theta: float,
    eps: float,
    *,
    c0: float = 10.0,
    radius: float = 0.5,
    tol: float | None = None,
    contact_tol: float = 1e-10,
) -> DichotomyResult:
    """Classify a solved instance against the two-branch contact prediction.

    Both branches must satisfy the outer sandwich: the wedge with sharpness
    theta + C0*eps (clamped to valid range) lies inside the subgraph of u on
    the ambient ball of the given radius.  When theta >= C0*eps the full
    contact branch additionally requires the subgraph inside the wedge with
    sharpness theta - C0*eps and complete contact of the constrained nodes
    in the ball.  Defects are measured column-wise, exploiting that wedges
    and subgraphs are downward closed.
    """
    grid = u.grid
    if not (0 <= theta <= math.pi / 2 - abs(gamma)):
        raise RangeError("sharpness must lie in [0, pi/2 - |gamma|]")
    if eps < 0:
        raise RangeError("perturbation size must be non-negative")
    if tol is None:
        tol = 10.0 * grid.h**2

    in_disk, top, s = _column_geometry(grid, radius)
    bottom = -top
    vals = u.values

    theta_out = min(theta + c0 * eps, math.pi / 2 - abs(gamma))
    w_out = wedge_profile(gamma, theta_out, s)
    # wedge column reaches the ball only where its height clears the bottom
    reach = in_disk & (w_out >= bottom)
    lower = np.minimum(w_out, top) - vals
    lower_defect = float(np.max(lower[reach], initial=0.0))

    theta_in = max(theta - c0 * eps, 0.0)
    w_in = wedge_profile(gamma, theta_in, s)
    reach_u = in_disk & (vals >= bottom)
    upper = np.minimum(vals, top) - w_in
    upper_defect = float(np.max(upper[reach_u], initial=0.0))

    ball_slice = grid.slice_mask & in_disk
    slack = vals - psi.values
    n_slice = int(ball_slice.sum())
    n_contact = int((ball_slice & (slack <= contact_tol)).sum())
    contact_fraction = n_contact / n_slice if n_slice else 1.0

    full = theta >= c0 * eps
    failures: list[str] = []
    if lower_defect > tol:
        failures.append(
            f"widened wedge leaves the subgraph by {lower_defect:.3e} (tol {tol:.3e})"
        )
    if full:
        if upper_defect > tol:
            failures.append(
                f"subgraph leaves the narrowed wedge by {upper_defect:.3e} (tol {tol:.3e})"
            )
        if n_contact < n_slice:
            failures.append(
                f"contact covers {n_contact}/{n_slice} constrained nodes in the ball"
            )
    return DichotomyResult(
        branch="full_contact" if full else "flat",
        gamma=gamma,
        theta=theta,
        eps=eps,
        c0=c0,
        radius=radius,
        tol=float(tol),
        lower_defect=lower_defect,
        upper_defect=upper_defect,
        contact_fraction=contact_fraction,
        ok=not failures,
        failures=tuple(failures),
    )


def certify_dichotomy(result: DichotomyResult) -> DichotomyResult:
    """Raise TheoremViolation if the dichotomy audit failed; else pass through."""
    if not result.ok:
        raise TheoremViolation(
            f"dichotomy violated on branch {result.branch!r}: " + "; ".join(result.failures)
        )
    return result
