"""Builtin boundary-data and obstacle families.

Each family is a closure over broadcastable coordinate arrays so the same
description works for evaluating collar data, initial iterates, and exact
reference fields.  Names and parameter keys are part of the problem-file
schema.
"""

from __future__ import annotations

import math
from typing import Any, Callable

import numpy as np

from .errors import ConfigError
from .grid import Field, GridSpec, load_field_csv


def u_three_halves(x1, x2):
    """Re((x1 + i|x2|)^{3/2}), principal branch.

    Harmonic off the ray {x1 <= 0, x2 = 0}, vanishes on it, positive on the
    rest of {x2 = 0}, and its normal derivative jumps by -3 sqrt(-x1) across
    the ray.  This is the canonical 3/2-homogeneous profile the constrained
    harmonic solver must reproduce, and the exact solution when the boundary
    data is its own trace with a zero obstacle.
    """
    z = np.asarray(x1, dtype=float) + 1j * np.abs(np.asarray(x2, dtype=float))
    u = np.real(z ** 1.5)
    on_ray = (np.asarray(x2) == 0.0) & (np.asarray(x1) <= 0.0)
    return np.where(on_ray, 0.0, u)


def wedge_profile(gamma: float, theta: float, s):
    """Height of the wedge boundary over the slice coordinate s.

    The region {x_n <= wedge_profile(s)} is exactly the wedge with tilt
    gamma and sharpness theta (faces t = -tan(gamma +/- theta) s).
    """
    s = np.asarray(s, dtype=float)
    return -math.tan(gamma + theta) * np.maximum(s, 0.0) - math.tan(gamma - theta) * np.minimum(
        s, 0.0
    )


def _family_constant(params: dict[str, Any], n: int) -> Callable:
    value = float(params.get("value", 0.0))
    return lambda *coords: np.full(np.broadcast(*coords).shape, value)


def _family_affine(params: dict[str, Any], n: int) -> Callable:
    coeffs = [float(c) for c in params.get("coeffs", [0.0] * (n - 1))]
    offset = float(params.get("offset", 0.0))
    if len(coeffs) != n - 1:
        raise ConfigError(f"affine family needs {n - 1} coefficients, got {len(coeffs)}")

    def fn(*coords):
        out = np.asarray(offset, dtype=float)
        for c, x in zip(coeffs, coords):
            out = out + c * x
        return out

    return fn


def _family_harmonic_quadratic(params: dict[str, Any], n: int) -> Callable:
    if n != 3:
        raise ConfigError("harmonic_quadratic requires ambient dimension 3")
    scale = float(params.get("scale", 1.0))
    return lambda x1, x2: scale * (x1 * x1 - x2 * x2)


def _family_homogeneous_3_2(params: dict[str, Any], n: int) -> Callable:
    if n != 3:
        raise ConfigError("homogeneous_3_2 requires ambient dimension 3")
    scale = float(params.get("scale", 1.0))
    return lambda x1, x2: scale * u_three_halves(x1, x2)


def _family_wedge_trace(params: dict[str, Any], n: int) -> Callable:
    gamma = float(params.get("gamma", 0.0))
    theta = float(params.get("theta", 0.0))
    eps = float(params.get("eps", 0.0))
    if abs(gamma) + theta >= math.pi / 2:
        raise ConfigError("wedge trace needs |gamma| + theta < pi/2 for finite slopes")

    def fn(*coords):
        s = coords[-1]
        out = wedge_profile(gamma, theta, s)
        if eps != 0.0:
            # odd perturbation along the slice coordinate; vanishes where the
            # constraint hyperplane meets the boundary sphere
            out = out + eps * np.sin(math.pi * s)
        return np.broadcast_to(out, np.broadcast(*coords).shape)

    return fn


FAMILIES: dict[str, Callable[[dict[str, Any], int], Callable]] = {
    "constant": _family_constant,
    "affine": _family_affine,
    "harmonic_quadratic": _family_harmonic_quadratic,
    "homogeneous_3_2": _family_homogeneous_3_2,
    "wedge_trace": _family_wedge_trace,
}


def make_field(grid: GridSpec, spec: dict[str, Any] | float | int) -> Field:
    """Build a Field from a family description, a bare number, or a CSV path.

    Accepted forms: {"name": ..., "params": {...}}, {"csv": "path"}, or a
    number (constant field).
    """
    if isinstance(spec, (int, float)):
        return grid.evaluate(_family_constant({"value": spec}, grid.n))
    if not isinstance(spec, dict):
        raise ConfigError(f"cannot interpret data description {spec!r}")
    if "csv" in spec:
        return load_field_csv(grid, spec["csv"])
    name = spec.get("name")
    if name not in FAMILIES:
        raise ConfigError(f"unknown data family {name!r}; known: {sorted(FAMILIES)}")
    fn = FAMILIES[name](spec.get("params", {}), grid.n)
    return grid.evaluate(fn)
