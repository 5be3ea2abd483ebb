"""Shared fixtures: the expensive reference solves are computed once per session."""

from __future__ import annotations

import numpy as np
import pytest

import wedgeflow as wf
from wedgeflow import data


def solve_u32(h: float):
    """Solve the unilateral problem whose exact solution is the 3/2-homogeneous profile."""
    grid = wf.GridSpec(3, h)
    psi = data.make_field(grid, 0.0)
    g = data.make_field(grid, {"name": "homogeneous_3_2", "params": {}})
    u, info = wf.solve_signorini(
        wf.SignoriniProblem(grid, psi, g), return_info=True
    )
    return grid, psi, g, u, info


@pytest.fixture(scope="session")
def u32_32():
    return solve_u32(1 / 32)


@pytest.fixture(scope="session")
def u32_64():
    return solve_u32(1 / 64)


@pytest.fixture(scope="session")
def u32_128():
    return solve_u32(1 / 128)


@pytest.fixture(scope="session")
def exact_error_u32():
    """Max-norm error of each cached solve against the closed form."""

    def err(bundle):
        grid, _, g, u, _ = bundle
        return float(np.max(np.abs(u.values - g.values)))

    return err
