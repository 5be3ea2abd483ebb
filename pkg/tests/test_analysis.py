"""Scaling experiments: density ratios, blow-ups, and closeness improvement."""

from __future__ import annotations

import math

import numpy as np
import pytest

import wedgeflow as wf
from wedgeflow import data
from wedgeflow.analysis import (
    ExperimentParams,
    blowup_sequence,
    improvement_report,
    monotonicity_profile,
    trace_length_in_ball,
    vertical_rescale,
)
from wedgeflow.flatland import PlanarConfig, PlanarSet, taut_minimizer
from wedgeflow.grid import GridSpec
from wedgeflow.minimal_graph import solve_min_graph, wedge_instance


# ------------------------------------------------- trace length in ball


def test_trace_length_diameter():
    s = taut_minimizer(PlanarConfig(0.0, 180.0, side="cw"))
    # the diameter clipped to B_r(0) has length 2r
    for r in (0.25, 0.5, 0.9):
        assert trace_length_in_ball(s, np.zeros(2), r) == pytest.approx(
            2 * r, abs=1e-12
        )


def test_trace_length_apex_path():
    s = taut_minimizer(PlanarConfig(-45.0, 225.0, side="cw"))
    # two radii through the origin: length 2r in B_r
    assert trace_length_in_ball(s, np.zeros(2), 0.3) == pytest.approx(
        0.6, abs=1e-12
    )


def test_trace_length_off_center_segment():
    s = PlanarSet(vertices=((1.0, 0.0), (-1.0, 0.0)), side="ccw")
    # ball centered off the segment line: chord of the circle x^2 = r^2 - c^2
    c = np.array([0.0, 0.3])
    r = 0.5
    expected = 2 * math.sqrt(r * r - 0.3 * 0.3)
    assert trace_length_in_ball(s, c, r) == pytest.approx(expected, abs=1e-12)
    # ball that misses the segment entirely
    assert trace_length_in_ball(s, np.array([0.0, 0.6]), 0.5) == 0.0


def test_trace_length_arc_overlap():
    s = taut_minimizer(PlanarConfig(-45.0, 225.0, side="ccw", delta=0.2))
    # a tiny ball around the sector apex direction at radius 1 on the arc:
    # the arc lives on the unit circle around the origin; ball at the arc
    # midpoint (angle -90 deg) of radius rho covers an arc of length
    # 2*arcsin(rho/2) on each side
    mid = np.array([0.0, -1.0])
    rho = 0.05
    got = trace_length_in_ball(s, mid, rho)
    expected = 2 * 2 * math.asin(rho / 2)
    assert got == pytest.approx(expected, abs=1e-12)


# ------------------------------------------------------- monotonicity


def test_profile_constant_on_cones():
    s = taut_minimizer(PlanarConfig(-45.0, 225.0, side="cw"))
    prof = monotonicity_profile(s, np.zeros(2), (0.0625, 0.125, 0.25, 0.5))
    assert prof.monotone
    # cones have exactly constant density ratio: length/r = 2
    np.testing.assert_allclose(prof.values, 2.0, atol=1e-12)
    assert prof.worst_violation <= 0.0


def test_profile_monotone_on_taut_minimizers():
    s = taut_minimizer(PlanarConfig(-45.0, 225.0, side="ccw"))
    prof = monotonicity_profile(s, np.zeros(2), (0.125, 0.25, 0.5, 0.9))
    assert prof.monotone


def test_profile_on_solved_field(u32_64):
    grid, psi, g, u, _ = u32_64
    center = np.zeros(3)
    prof = monotonicity_profile(u, center, (0.125, 0.25, 0.5))
    assert prof.monotone, prof


def test_profile_exact_wedge_variation_below_h():
    # The density ratio of an exact wedge graph is constant in r; the
    # midpoint quadrature carries an O(h/r) error, so the claim is tested
    # at radii in the resolved regime r >= 32 h.
    grid = GridSpec(3, 1 / 64)
    radii = (0.5, 0.7, 0.9)
    for gamma, theta in ((0.0, 0.2), (0.2, 0.3), (-0.3, 0.1)):
        prob = wedge_instance(grid, gamma, theta)
        u = solve_min_graph(prob)
        prof = monotonicity_profile(u, np.zeros(3), radii)
        spread = max(prof.values) - min(prof.values)
        assert spread <= grid.h


def test_profile_input_validation():
    s = taut_minimizer(PlanarConfig(0.0, 180.0, side="cw"))
    with pytest.raises(wf.RangeError):
        monotonicity_profile(s, np.zeros(2), (0.5,))  # need two radii
    with pytest.raises(wf.RangeError):
        monotonicity_profile(s, np.zeros(2), (0.5, 0.25))  # not increasing
    with pytest.raises(wf.RangeError):
        monotonicity_profile(s, np.array([0.8, 0.0]), (0.25, 0.5))  # exits disk


# ------------------------------------------------------------ rescale


def test_vertical_rescale():
    grid = GridSpec(3, 1 / 16)
    f = data.make_field(grid, {"name": "constant", "params": {"value": 0.3}})
    g = vertical_rescale(f, 0.1)
    np.testing.assert_allclose(g.values, 1.5)
    with pytest.raises(wf.RangeError):
        vertical_rescale(f, 0.0)


# ------------------------------------------------------------- blowup


def test_blowup_on_planar_wedge_cone():
    # the apex path is an exact cone: every rescaling fits with zero defect
    s = taut_minimizer(PlanarConfig(-45.0, 225.0, side="cw"))
    rep = blowup_sequence(s, np.zeros(2))
    assert len(rep.radii) >= 3
    for eps in rep.epsilons:
        assert eps <= 1e-7
    # fitted wedges stabilize: same gamma/theta at every scale
    gammas = {round(w.gamma, 6) for w in rep.wedges}
    assert len(gammas) == 1


def test_blowup_on_slit_foot_is_conic():
    # the foot path kinks at (0,-1) where the two chords meet in an
    # upward V; the V is a cone, so once the ladder drops below the chord
    # length the rescaled cloud is self-similar: the relative defect
    # saturates at a positive constant and the absolute defect eps*r
    # halves each rung (exactly linear decay in the radius)
    s = taut_minimizer(PlanarConfig(-45.0, 225.0, side="ccw"))
    rep = blowup_sequence(s, np.array([0.0, -1.0]))
    conic = [
        (r, e) for r, e in zip(rep.radii, rep.epsilons) if r <= 0.5 + 1e-12
    ]
    assert len(conic) >= 3
    eps = [e for _, e in conic]
    assert max(eps) - min(eps) <= 1e-3  # saturated, up to resampling wobble
    assert min(eps) > 0.1  # genuinely not a downward wedge
    absd = [r * e for r, e in conic]
    for a, b in zip(absd, absd[1:]):
        assert b / a == pytest.approx(0.5, abs=0.05)


def test_blowup_on_field(u32_128):
    grid, psi, g, u, _ = u32_128
    rep = blowup_sequence(u, np.zeros(2))
    # defects shrink: the 3/2-homogeneous graph flattens under zoom
    assert rep.epsilons[-1] < rep.epsilons[0]
    assert len(rep.wedges) == len(rep.radii)


def test_blowup_point_validation(u32_64):
    _, _, _, u, _ = u32_64
    with pytest.raises(wf.RangeError):
        blowup_sequence(u, np.array([2.0, 0.0]))


def test_experiment_params_validation():
    ExperimentParams(rho0=0.5, scales=5, alpha=0.25)
    with pytest.raises(wf.RangeError):
        ExperimentParams(rho0=1.5)
    with pytest.raises(wf.RangeError):
        ExperimentParams(scales=2)
    with pytest.raises(wf.RangeError):
        ExperimentParams(alpha=0.7)


# ---------------------------------------------------------- improvement


def test_improvement_on_u32_field(u32_128):
    grid, _, _, u, _ = u32_128
    rep = blowup_sequence(u, np.zeros(2))
    imp = improvement_report(rep)
    assert not imp.vacuous
    assert imp.passes
    assert 0.4 <= imp.rate <= 0.6  # brackets the sharp 1/2


def test_improvement_vacuous_on_exact_cone():
    s = taut_minimizer(PlanarConfig(-45.0, 225.0, side="cw"))
    rep = blowup_sequence(s, np.zeros(2))
    imp = improvement_report(rep)
    # exact cones give zero defects at every scale: nothing to regress
    assert imp.vacuous
    assert imp.passes


def test_improvement_alpha_threshold(u32_128):
    _, _, _, u, _ = u32_128
    rep = blowup_sequence(u, np.zeros(2))
    # the measured rate sits just under the sharp 1/2: a modest demand
    # passes, one tighter than the measurement fails, and demands at or
    # beyond the sharp exponent are rejected outright
    loose = improvement_report(rep, alpha=0.4)
    strict = improvement_report(rep, alpha=0.49)
    assert loose.rate == strict.rate
    assert loose.passes
    assert not strict.passes
    for bad in (0.8, 0.5, 0.0, -0.1):
        with pytest.raises(wf.RangeError):
            improvement_report(rep, alpha=bad)
