"""Uniform node lattices over the horizontal cross-section and discrete operators.

The domain of a height function is the (n-1)-dimensional box
[-L, L]^{n-1} with L one lattice step ring beyond the unit ball: nodes sit
at integer multiples of h, 1/h is an integer >= 8, and the box extends to
round(1.1/h) steps so a collar of roughly 0.1 of Dirichlet nodes surrounds
B_1.  The constraint hyperplane {x_{n-1} = 0} is always node-aligned.

Orientation conventions used throughout: a height function f describes the
set {x_n <= f(x')} (the region below its graph), and the curvature operator
is the divergence of the normalized gradient, so downward-bending graphs
(concave kinks) have negative curvature.

The curvature operator is the exact gradient of ``area_energy`` with
respect to node values (up to the factor -h^{n-1}), which is what makes
gradient descent on the energy and the printed curvature residuals agree.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from numba import njit
from numpy.typing import NDArray

from .errors import GridError, RangeError


@dataclass(frozen=True)
class GridSpec:
    """Lattice for height functions over R^{n-1}, ambient dimension n in {2, 3, 4}."""

    n: int
    h: float

    def __post_init__(self):
        if self.n not in (2, 3, 4):
            raise GridError(f"ambient dimension must be 2, 3 or 4, got {self.n}")
        m = round(1.0 / self.h)
        if m < 8 or abs(1.0 / self.h - m) > 1e-9:
            raise GridError(f"1/h must be an integer >= 8, got h={self.h}")

    @property
    def d(self) -> int:
        """Dimension of the horizontal cross-section."""
        return self.n - 1

    @property
    def steps_per_unit(self) -> int:
        return round(1.0 / self.h)

    @property
    def k_max(self) -> int:
        """Lattice steps from the origin to the box edge (collar included)."""
        return round(1.1 * self.steps_per_unit)

    @property
    def axis_size(self) -> int:
        return 2 * self.k_max + 1

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.axis_size,) * self.d

    @property
    def origin_index(self) -> tuple[int, ...]:
        return (self.k_max,) * self.d

    @cached_property
    def axis_coords(self) -> NDArray[np.float64]:
        return (np.arange(self.axis_size) - self.k_max) * self.h

    def coord_arrays(self) -> list[NDArray[np.float64]]:
        """1D coordinate arrays shaped for broadcasting over the node lattice."""
        out = []
        for a in range(self.d):
            sh = [1] * self.d
            sh[a] = self.axis_size
            out.append(self.axis_coords.reshape(sh))
        return out

    @cached_property
    def radius_sq(self) -> NDArray[np.float64]:
        r2 = np.zeros(self.shape)
        for c in self.coord_arrays():
            r2 = r2 + c * c
        return r2

    @cached_property
    def interior_mask(self) -> NDArray[np.bool_]:
        """Nodes strictly inside the unit ball; everything else holds data."""
        return self.radius_sq < 1.0 - 1e-12

    @cached_property
    def slice_mask(self) -> NDArray[np.bool_]:
        """Interior nodes on the constraint hyperplane {x_{n-1} = 0}."""
        mask = np.zeros(self.shape, dtype=bool)
        mask[..., self.k_max] = True
        return mask & self.interior_mask

    def node_coords(self) -> NDArray[np.float64]:
        """Full (shape..., d) coordinate array.  Heavy for n = 4; prefer coord_arrays."""
        grids = np.meshgrid(*([self.axis_coords] * self.d), indexing="ij")
        return np.stack(grids, axis=-1)

    def evaluate(self, fn) -> "Field":
        """Sample fn(*coordinate_arrays) over the lattice via broadcasting."""
        vals = np.asarray(fn(*self.coord_arrays()), dtype=float)
        vals = np.broadcast_to(vals, self.shape).copy()
        return Field(self, vals)


@dataclass
class Field:
    """Node values over a GridSpec lattice."""

    grid: GridSpec
    values: NDArray[np.float64]

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.shape != self.grid.shape:
            raise GridError(
                f"values shape {self.values.shape} does not match grid {self.grid.shape}"
            )
        if not np.isfinite(self.values).all():
            raise GridError("field values must be finite")

    def copy(self) -> "Field":
        return Field(self.grid, self.values.copy())


def _pair_avg(a: NDArray, axis: int) -> NDArray:
    lo = [slice(None)] * a.ndim
    hi = [slice(None)] * a.ndim
    lo[axis] = slice(None, -1)
    hi[axis] = slice(1, None)
    return 0.5 * (a[tuple(hi)] + a[tuple(lo)])


def _cell_gradients(vals: NDArray, h: float) -> list[NDArray]:
    """Per-cell gradient components from corner differences; shapes (N-1,)*d."""
    d = vals.ndim
    out = []
    for a in range(d):
        g = np.diff(vals, axis=a) / h
        for b in range(d):
            if b != a:
                g = _pair_avg(g, axis=b)
        out.append(g)
    return out


def _interior_block(shape: tuple[int, ...]) -> tuple[slice, ...]:
    return tuple(slice(1, s - 1) for s in shape)


def discrete_laplacian(f: Field) -> Field:
    """Second-difference Laplacian; the outermost node ring is left at zero."""
    vals = f.values
    h2 = f.grid.h * f.grid.h
    out = np.zeros_like(vals)
    core = _interior_block(vals.shape)
    acc = np.zeros_like(vals[core])
    for a in range(vals.ndim):
        lo = [slice(1, -1)] * vals.ndim
        hi = [slice(1, -1)] * vals.ndim
        lo[a] = slice(None, -2)
        hi[a] = slice(2, None)
        acc += vals[tuple(hi)] + vals[tuple(lo)] - 2.0 * vals[core]
    out[core] = acc / h2
    return Field(f.grid, out)


@njit(cache=True)
def _mean_curvature_3d(v, h):
    """Fused flux-divergence pass for d = 3; same stencil as the array code.

    Walks cell slabs along the first axis with rolling normalized-flux
    buffers, so only two slabs of flux live at a time instead of three
    full cell arrays plus temporaries.
    """
    N = v.shape[0]
    M = N - 1
    out = np.zeros((N, N, N))
    f0_prev = np.empty((M, M))
    f1_prev = np.empty((M, M))
    f2_prev = np.empty((M, M))
    f0_cur = np.empty((M, M))
    f1_cur = np.empty((M, M))
    f2_cur = np.empty((M, M))
    inv4h = 1.0 / (4.0 * h)
    for ci in range(M):
        for cj in range(M):
            for ck in range(M):
                a000 = v[ci, cj, ck]
                a100 = v[ci + 1, cj, ck]
                a010 = v[ci, cj + 1, ck]
                a110 = v[ci + 1, cj + 1, ck]
                a001 = v[ci, cj, ck + 1]
                a101 = v[ci + 1, cj, ck + 1]
                a011 = v[ci, cj + 1, ck + 1]
                a111 = v[ci + 1, cj + 1, ck + 1]
                g0 = ((a100 + a110 + a101 + a111) - (a000 + a010 + a001 + a011)) * inv4h
                g1 = ((a010 + a110 + a011 + a111) - (a000 + a100 + a001 + a101)) * inv4h
                g2 = ((a001 + a101 + a011 + a111) - (a000 + a100 + a010 + a110)) * inv4h
                dens = np.sqrt(1.0 + g0 * g0 + g1 * g1 + g2 * g2)
                f0_cur[cj, ck] = g0 / dens
                f1_cur[cj, ck] = g1 / dens
                f2_cur[cj, ck] = g2 / dens
        if ci >= 1:
            for J in range(1, M):
                for K in range(1, M):
                    t0 = (
                        (f0_cur[J - 1, K - 1] - f0_prev[J - 1, K - 1])
                        + (f0_cur[J - 1, K] - f0_prev[J - 1, K])
                        + (f0_cur[J, K - 1] - f0_prev[J, K - 1])
                        + (f0_cur[J, K] - f0_prev[J, K])
                    )
                    t1 = (
                        (f1_prev[J, K - 1] - f1_prev[J - 1, K - 1])
                        + (f1_prev[J, K] - f1_prev[J - 1, K])
                        + (f1_cur[J, K - 1] - f1_cur[J - 1, K - 1])
                        + (f1_cur[J, K] - f1_cur[J - 1, K])
                    )
                    t2 = (
                        (f2_prev[J - 1, K] - f2_prev[J - 1, K - 1])
                        + (f2_prev[J, K] - f2_prev[J, K - 1])
                        + (f2_cur[J - 1, K] - f2_cur[J - 1, K - 1])
                        + (f2_cur[J, K] - f2_cur[J, K - 1])
                    )
                    out[ci, J, K] = (t0 + t1 + t2) * inv4h
        f0_prev, f0_cur = f0_cur, f0_prev
        f1_prev, f1_cur = f1_cur, f1_prev
        f2_prev, f2_cur = f2_cur, f2_prev
    return out


def mean_curvature(f: Field, impl: str = "auto") -> Field:
    """Divergence of the normalized gradient, discretized on cells.

    This is exactly -(d area_energy / d node value) / h^{n-1}, so its sign
    and magnitude are the ones gradient descent on the area sees.  Values on
    the outermost node ring are left at zero (no full cell neighborhood).

    ``impl`` selects the evaluation path: "numpy" is the reference array
    code, "jit" a fused single-pass kernel (d = 3 only), "auto" picks the
    kernel exactly when it applies.  Both compute the same stencil; the
    test suite pins their agreement.
    """
    vals = f.values
    h = f.grid.h
    if impl not in ("auto", "numpy", "jit"):
        raise GridError(f"impl must be auto, numpy or jit, got {impl!r}")
    if impl == "jit" and vals.ndim != 3:
        raise GridError("the fused kernel only exists for three grid axes")
    if vals.ndim == 3 and impl in ("auto", "jit"):
        return Field(f.grid, _mean_curvature_3d(vals, h))
    G = _cell_gradients(vals, h)
    norm = np.ones_like(G[0])
    for g in G:
        norm += g * g
    np.sqrt(norm, out=norm)
    out = np.zeros_like(vals)
    core = _interior_block(vals.shape)
    acc = np.zeros_like(vals[core])
    for a in range(vals.ndim):
        flux = G[a] / norm
        t = np.diff(flux, axis=a) / h
        for b in range(vals.ndim):
            if b != a:
                t = _pair_avg(t, axis=b)
        acc += t
    out[core] = acc
    return Field(f.grid, out)


@njit(cache=True)
def _quasilinear_3d(v, h):
    """Fused centered-difference pass for d = 3; same stencil as the array code."""
    N = v.shape[0]
    out = np.zeros((N, N, N))
    inv2h = 1.0 / (2.0 * h)
    invh2 = 1.0 / (h * h)
    inv4h2 = 1.0 / (4.0 * h * h)
    for i in range(1, N - 1):
        for j in range(1, N - 1):
            for k in range(1, N - 1):
                c = v[i, j, k]
                g0 = (v[i + 1, j, k] - v[i - 1, j, k]) * inv2h
                g1 = (v[i, j + 1, k] - v[i, j - 1, k]) * inv2h
                g2 = (v[i, j, k + 1] - v[i, j, k - 1]) * inv2h
                d00 = (v[i + 1, j, k] - 2.0 * c + v[i - 1, j, k]) * invh2
                d11 = (v[i, j + 1, k] - 2.0 * c + v[i, j - 1, k]) * invh2
                d22 = (v[i, j, k + 1] - 2.0 * c + v[i, j, k - 1]) * invh2
                d01 = (
                    v[i + 1, j + 1, k] - v[i + 1, j - 1, k] - v[i - 1, j + 1, k] + v[i - 1, j - 1, k]
                ) * inv4h2
                d02 = (
                    v[i + 1, j, k + 1] - v[i + 1, j, k - 1] - v[i - 1, j, k + 1] + v[i - 1, j, k - 1]
                ) * inv4h2
                d12 = (
                    v[i, j + 1, k + 1] - v[i, j + 1, k - 1] - v[i, j - 1, k + 1] + v[i, j - 1, k - 1]
                ) * inv4h2
                gg = g0 * g0 + g1 * g1 + g2 * g2
                lap = d00 + d11 + d22
                quad = (
                    g0 * g0 * d00
                    + g1 * g1 * d11
                    + g2 * g2 * d22
                    + 2.0 * (g0 * g1 * d01 + g0 * g2 * d02 + g1 * g2 * d12)
                )
                out[i, j, k] = (1.0 + gg) * lap - quad
    return out


def quasilinear_form(f: Field, impl: str = "auto") -> Field:
    """(1 + |grad f|^2) Lap f - grad f . D2 f . grad f with centered differences.

    Same sign as mean_curvature wherever both are meaningfully nonzero; kept
    separate because barrier arguments are stated for this non-divergence
    form while the solver works with the divergence form.  ``impl`` selects
    the evaluation path as in mean_curvature.
    """
    vals = f.values
    h = f.grid.h
    d = vals.ndim
    if impl not in ("auto", "numpy", "jit"):
        raise GridError(f"impl must be auto, numpy or jit, got {impl!r}")
    if impl == "jit" and d != 3:
        raise GridError("the fused kernel only exists for three grid axes")
    if d == 3 and impl in ("auto", "jit"):
        return Field(f.grid, _quasilinear_3d(vals, h))
    core = _interior_block(vals.shape)

    def sh(axis_offsets: dict[int, int]) -> NDArray:
        idx = []
        for a in range(d):
            off = axis_offsets.get(a, 0)
            idx.append(slice(1 + off, vals.shape[a] - 1 + off))
        return vals[tuple(idx)]

    grad = [(sh({a: 1}) - sh({a: -1})) / (2 * h) for a in range(d)]
    gg = np.zeros_like(grad[0])
    for g in grad:
        gg += g * g
    lap = np.zeros_like(grad[0])
    quad = np.zeros_like(grad[0])
    for a in range(d):
        daa = (sh({a: 1}) - 2.0 * sh({}) + sh({a: -1})) / (h * h)
        lap += daa
        quad += grad[a] * grad[a] * daa
        for b in range(a + 1, d):
            dab = (sh({a: 1, b: 1}) - sh({a: 1, b: -1}) - sh({a: -1, b: 1}) + sh({a: -1, b: -1})) / (
                4 * h * h
            )
            quad += 2.0 * grad[a] * grad[b] * dab
    out = np.zeros_like(vals)
    out[core] = (1.0 + gg) * lap - quad
    return Field(f.grid, out)


def area_energy(f: Field, region: NDArray[np.bool_] | None = None) -> float:
    """Midpoint quadrature of sqrt(1 + |grad f|^2) over cells inside ``region``.

    ``region`` is a node mask; a cell counts when all its corners are in.
    Default is the whole box.
    """
    vals = f.values
    h = f.grid.h
    G = _cell_gradients(vals, h)
    dens = np.ones_like(G[0])
    for g in G:
        dens += g * g
    np.sqrt(dens, out=dens)
    if region is not None:
        if region.shape != vals.shape:
            raise GridError("region mask must match the node lattice")
        cm = region
        for a in range(vals.ndim):
            lo = [slice(None)] * vals.ndim
            hi = [slice(None)] * vals.ndim
            lo[a] = slice(None, -1)
            hi[a] = slice(1, None)
            cm = cm[tuple(lo)] & cm[tuple(hi)]
        dens = dens * cm
    return float(dens.sum() * h ** vals.ndim)


def area_energy_gradient(f: Field) -> NDArray[np.float64]:
    """d area_energy / d node value, outermost ring zeroed.  Equals -h^{n-1} * H."""
    Hf = mean_curvature(f)
    return -(f.grid.h ** f.grid.d) * Hf.values


def subgraph_perimeter_in_ball(f: Field, center, r: float) -> float:
    """Surface measure of the graph of f inside the ball B_r(center) in R^n.

    Cell-midpoint quadrature: a cell contributes its area element when its
    lifted center (cell center, mean of corner values) lies in the ball.
    Accurate to O(h).  The projected ball must stay inside the sampled box.
    """
    c = np.asarray(center, dtype=float)
    if c.shape != (f.grid.n,):
        raise ValueError(f"center must be a point in R^{f.grid.n}")
    if r <= 0:
        raise RangeError("radius must be positive")
    lim = f.grid.axis_coords[-1]
    if np.any(np.abs(c[:-1]) + r > lim + f.grid.h / 2):
        raise RangeError("ball exits the sampled region")
    vals = f.values
    h = f.grid.h
    G = _cell_gradients(vals, h)
    dens = np.ones_like(G[0])
    for g in G:
        dens += g * g
    np.sqrt(dens, out=dens)
    fc = vals
    for a in range(vals.ndim):
        fc = _pair_avg(fc, axis=a)
    centers = f.grid.axis_coords[:-1] + h / 2
    dist2 = (fc - c[-1]) ** 2
    for a in range(vals.ndim):
        shp = [1] * vals.ndim
        shp[a] = centers.size
        dist2 = dist2 + (centers.reshape(shp) - c[a]) ** 2
    inside = dist2 <= r * r
    return float((dens * inside).sum() * h ** vals.ndim)


def dump_field_csv(f: Field, path) -> None:
    """Write nodes row-major as x1,...,x_{n-1},value with 17 significant digits."""
    d = f.grid.d
    header = ",".join(f"x{i + 1}" for i in range(d)) + ",value"
    coords = f.grid.node_coords().reshape(-1, d)
    vals = f.values.reshape(-1, 1)
    data = np.hstack([coords, vals])
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(header + "\n")
        for row in data:
            fh.write(",".join(f"{v:.17g}" for v in row) + "\n")


def load_field_csv(grid: GridSpec, path) -> Field:
    """Read a field written by dump_field_csv onto a matching grid."""
    raw = np.loadtxt(path, delimiter=",", skiprows=1)
    raw = np.atleast_2d(raw)
    if raw.shape[1] != grid.d + 1:
        raise GridError(f"csv has {raw.shape[1]} columns, expected {grid.d + 1}")
    if raw.shape[0] != int(np.prod(grid.shape)):
        raise GridError("csv row count does not match the grid")
    return Field(grid, raw[:, -1].reshape(grid.shape))
