"""Constrained harmonic solver: convergence, structure theorems, exponents."""

from __future__ import annotations

import math

import numpy as np
import pytest

import wedgeflow as wf
from wedgeflow import data
from wedgeflow.grid import Field, GridSpec
from wedgeflow.signorini import (
    SignoriniProblem,
    brute_force_signorini,
    complementarity_report,
    contact_set,
    dirichlet_energy,
    exponent_fit,
    free_boundary,
    initial_iterate,
    solve_signorini,
)


def small_problem(h=1 / 16, psi_spec=0.0, g_spec=None, **kw):
    grid = GridSpec(3, h)
    psi = data.make_field(grid, psi_spec)
    if g_spec is None:
        g_spec = {"name": "homogeneous_3_2", "params": {}}
    g = data.make_field(grid, g_spec)
    return SignoriniProblem(grid, psi, g, **kw)


# --------------------------------------------------------------- solver


def test_solver_converges_and_reports(u32_64):
    _, _, _, u, info = u32_64
    assert info.converged
    assert info.sweeps > 0
    assert info.final_update <= 1e-8


def test_solution_error_against_closed_form(u32_64, exact_error_u32):
    err = exact_error_u32(u32_64)
    assert err < 1.5e-4  # measured 6.4e-5 at h = 1/64; order-1.5 headroom


def test_energy_descent_across_sweeps(u32_64):
    _, _, _, _, info = u32_64
    hist = np.array(info.energy_history)  # rows of (sweep, energy)
    assert hist.shape[0] >= 2
    assert (np.diff(hist[:, 1]) <= 1e-12).all()


def test_constraint_and_data_respected(u32_64):
    grid, psi, g, u, _ = u32_64
    sl = grid.slice_mask
    assert (u.values[sl] >= psi.values[sl] - 1e-12).all()
    outside = ~grid.interior_mask
    np.testing.assert_array_equal(u.values[outside], g.values[outside])


def test_harmonic_data_left_untouched():
    # obstacle far below: the constraint never binds, u is discrete-harmonic
    prob = small_problem(
        psi_spec={"name": "constant", "params": {"value": -10.0}},
        g_spec={"name": "harmonic_quadratic", "params": {}},
    )
    u = solve_signorini(prob)
    rep = complementarity_report(u, prob.psi)
    assert rep.contact_count == 0
    exact = data.make_field(prob.grid, {"name": "harmonic_quadratic", "params": {}})
    assert np.max(np.abs(u.values - exact.values)) < 1e-6


def test_comparison_principle():
    # psi1 <= psi2 pointwise with the same data forces u1 <= u2
    prob1 = small_problem(psi_spec={"name": "constant", "params": {"value": -0.05}})
    prob2 = small_problem(psi_spec={"name": "constant", "params": {"value": 0.0}})
    u1 = solve_signorini(prob1)
    u2 = solve_signorini(prob2)
    assert (u1.values <= u2.values + 1e-10).all()


def test_scaling_covariance():
    # data (lambda g, lambda psi) produces exactly lambda u
    lam = 2.0
    prob = small_problem()
    scaled = SignoriniProblem(
        prob.grid,
        Field(prob.grid, lam * prob.psi.values),
        Field(prob.grid, lam * prob.g.values),
        tol=prob.tol * lam,
    )
    u = solve_signorini(prob)
    v = solve_signorini(scaled)
    np.testing.assert_allclose(v.values, lam * u.values, atol=1e-9)


def test_solver_nonconvergence_raises():
    prob = small_problem(max_iters=3)
    with pytest.raises(wf.SolverError):
        solve_signorini(prob)


def test_initial_iterate_respects_constraint():
    prob = small_problem(psi_spec={"name": "constant", "params": {"value": 0.2}})
    w = initial_iterate(prob)
    sl = prob.grid.slice_mask
    assert (w[sl] >= 0.2 - 1e-15).all()


def test_ambient_dimension_two():
    # d = 1: slice is the single origin node
    grid = GridSpec(2, 1 / 16)
    psi = data.make_field(grid, 0.0)
    g = grid.evaluate(lambda x1: np.abs(x1))
    u = solve_signorini(SignoriniProblem(grid, psi, g))
    assert u.values[grid.origin_index] >= -1e-12


# ------------------------------------------------------ grid convergence


def test_convergence_order(u32_32, u32_64, exact_error_u32):
    e32 = exact_error_u32(u32_32)
    e64 = exact_error_u32(u32_64)
    order = math.log2(e32 / e64)
    assert order >= 0.9


# ------------------------------------------------------- KKT structure


def test_complementarity_report_on_reference(u32_64):
    grid, psi, _, u, _ = u32_64
    rep = complementarity_report(u, psi)
    # contact fills the ray {x1 <= 0} half of the slice
    assert 0.3 < rep.contact_fraction < 0.7
    assert rep.max_contact_excess <= 1e-10
    assert rep.min_slack >= -1e-12
    # residual scale: tol * 2d / (omega h^2)
    assert rep.max_kkt_residual < 1e-8 * 4 / (1.5 * (1 / 64) ** 2) * 2


def test_contact_set_matches_ray(u32_64):
    grid, psi, _, u, _ = u32_64
    contact = contact_set(u, psi)
    coords = grid.node_coords()
    on = coords[contact]
    assert (on[:, 1] == 0.0).all()
    assert (on[:, 0] <= 2 * grid.h).all()


def test_free_boundary_near_origin(u32_64):
    grid, psi, _, u, _ = u32_64
    fb = free_boundary(u, psi)
    assert len(fb) >= 1
    assert (np.linalg.norm(fb, axis=1) <= 2 * grid.h + 1e-12).all()


def test_free_boundary_empty_when_no_contact():
    prob = small_problem(
        psi_spec={"name": "constant", "params": {"value": -10.0}},
        g_spec={"name": "harmonic_quadratic", "params": {}},
    )
    u = solve_signorini(prob)
    assert free_boundary(u, prob.psi).shape[0] == 0


def test_trivial_zero_problem():
    grid = GridSpec(3, 1 / 16)
    zero = data.make_field(grid, 0.0)
    u = solve_signorini(SignoriniProblem(grid, zero, zero))
    rep = complementarity_report(u, zero)
    np.testing.assert_array_equal(u.values, 0.0)
    assert rep.max_kkt_residual == 0.0


def test_dirichlet_energy_quadratic():
    grid = GridSpec(3, 1 / 16)
    f = grid.evaluate(lambda x1, x2: x1 + 0 * x2)
    # edge-difference sum: (axis_size - 1) * axis_size unit-slope edges
    s = grid.axis_size
    expected = 0.5 * grid.h**2 * (s - 1) * s
    assert dirichlet_energy(f) == pytest.approx(expected, rel=1e-12)


# ------------------------------------------------------- brute force


def test_brute_force_agrees_with_psor():
    grid = GridSpec(3, 1 / 8)
    psi = data.make_field(grid, 0.0)
    g = data.make_field(grid, {"name": "homogeneous_3_2", "params": {}})
    prob = SignoriniProblem(grid, psi, g, tol=1e-12)
    u = solve_signorini(prob)
    ub = brute_force_signorini(prob)
    assert np.max(np.abs(u.values - ub.values)) < 1e-8


def test_brute_force_guard_on_large_slices():
    prob = small_problem(h=1 / 32)
    with pytest.raises(wf.RangeError):
        brute_force_signorini(prob)


# ------------------------------------------------------- exponent fit


def test_exponent_u32(u32_64):
    grid, psi, _, u, _ = u32_64
    fit = exponent_fit(u, psi, [0.0, 0.0])
    assert fit.kappa == pytest.approx(1.5, abs=0.12)
    assert len(fit.radii) == len(fit.oscillations)
    assert fit.annulus_nodes >= grid.d + 1


def test_exponent_harmonic_is_two(u32_64):
    prob = small_problem(
        h=1 / 64,
        psi_spec={"name": "constant", "params": {"value": -10.0}},
        g_spec={"name": "harmonic_quadratic", "params": {}},
    )
    u = solve_signorini(prob)
    fit = exponent_fit(u, prob.psi, [0.0, 0.0])
    assert fit.kappa >= 1.9


def test_exponent_wedge_kink_is_one():
    grid = GridSpec(3, 1 / 64)
    u = data.make_field(
        grid, {"name": "wedge_trace", "params": {"gamma": 0.0, "theta": 0.3}}
    )
    psi = data.make_field(grid, 0.0)
    # treat the wedge graph itself as a field with a contact-interior kink
    fit = exponent_fit(u, psi, [0.0, 0.0])
    assert fit.kappa == pytest.approx(1.0, abs=0.1)


def test_exponent_affine_reports_inf():
    grid = GridSpec(3, 1 / 32)
    u = data.make_field(grid, {"name": "affine", "params": {"coeffs": [0.1, -0.2]}})
    psi = data.make_field(grid, {"name": "constant", "params": {"value": -5.0}})
    fit = exponent_fit(u, psi, [0.0, 0.0])
    assert fit.kappa == math.inf


def test_exponent_requires_central_point(u32_64):
    _, psi, _, u, _ = u32_64
    with pytest.raises(wf.RangeError):
        exponent_fit(u, psi, [0.75, 0.0])


def test_exponent_requires_resolution():
    grid = GridSpec(3, 1 / 8)
    zero = data.make_field(grid, 0.0)
    with pytest.raises(wf.RangeError):
        exponent_fit(zero, zero, [0.0, 0.0])
