"""Closed-form families and the residual oracle."""

import math

import numpy as np
import pytest

from sddlab.closed_forms import (ClosedFormSolution, branch_exponent,
                                 clamp_window, driver_solutions,
                                 example2010_solutions, family_coefficient,
                                 family_window, key_family, max_abs_residual,
                                 residual, residual_grid, sup_difference)
from sddlab.errors import DomainError
from sddlab.registry import build_problem


def test_family_coefficient_anchor():
    assert family_coefficient(1.0, 0.5) == 0.25
    assert family_coefficient(0.5, 0.75) == pytest.approx(0.000244140625)
    assert branch_exponent(0.5) == 2.0
    assert branch_exponent(0.75) == 4.0


def test_key_yellow_value_anchor():
    sol = key_family({}, "yellow", 0.0)
    assert sol.value(0.5) == pytest.approx(1.4375)
    assert sol.value(0.0) == 1.0
    assert sol.label == "key2026-yellow-tau0"
    assert sol.params["tau"] == 0.0


def test_family_windows_defaults():
    lo, hi = family_window({}, "yellow", 0.0)
    assert hi == pytest.approx(math.sqrt(2.0))
    lo, hi = family_window({}, "blue", 0.0)
    assert hi == pytest.approx(2.0)
    lo, hi = family_window({}, "red", 0.0)
    assert math.isinf(hi)
    with pytest.raises(DomainError):
        family_window({}, "blue", 0.0, h=1.0)   # no room below the anchor


def test_family_windows_shift_with_tau():
    lo, hi = family_window({}, "yellow", 0.3)
    assert hi == pytest.approx(0.3 + math.sqrt(2.0))


def test_residuals_vanish_on_true_forms():
    p = build_problem("key2026")
    for fam, tau in (("red", 0.0), ("yellow", 0.0), ("yellow", 0.3),
                     ("blue", 0.0), ("blue", 0.3)):
        sol = key_family({}, fam, tau)
        if math.isinf(sol.window[1]):
            sol = clamp_window(sol, 3.0)
        assert max_abs_residual(p, sol, n=100) <= 1e-12, (fam, tau)


def test_residual_outside_window_raises():
    p = build_problem("key2026")
    sol = key_family({}, "yellow", 0.0)
    with pytest.raises(DomainError):
        residual(p, sol, sol.window[1] + 1.0)


def test_driver_forms_and_wrong_candidate():
    p = build_problem("driver1963")
    line, parabola = driver_solutions()
    assert line.label == "driver1963-red"
    assert parabola.window == (0.0, 2.0)
    assert parabola.derivative(0.0) == 1.0
    assert max_abs_residual(p, clamp_window(line, 2.0), n=100) <= 1e-12
    assert max_abs_residual(p, parabola, n=100) <= 1e-12

    # the would-be third solution: flipping the parabola leaves defect 4t
    wrong = ClosedFormSolution(
        "yellow", 0.0,
        value=lambda t: 4.0 + t + t * t,
        derivative=lambda t: 1.0 + 2.0 * t,
        window=(0.0, 1.0), params={}, label="driver1963-flipped")
    assert residual(p, wrong, 0.1) == pytest.approx(0.4, abs=1e-12)
    assert residual(p, wrong, 0.25) == pytest.approx(1.0, abs=1e-12)


def test_example2010_forms():
    for alpha in (0.25, 0.5, 0.75):
        p = build_problem("example2010", {"alpha": alpha})
        red, yellow, blue = example2010_solutions(alpha)
        assert red.value(0.0) == yellow.value(0.0) == blue.value(0.0) == 1.0
        assert max_abs_residual(p, clamp_window(red, 1.0), n=100) <= 1e-12
        assert max_abs_residual(p, yellow, n=100) <= 1e-12
        assert max_abs_residual(p, blue, n=100) <= 1e-12
    yellow = example2010_solutions(0.5)[1]
    blue = example2010_solutions(0.5)[2]
    assert yellow.value(0.5) == pytest.approx(1.25)
    assert blue.value(0.5) == pytest.approx(1.75)


def test_example2010_rejects_bad_alpha():
    with pytest.raises(DomainError):
        example2010_solutions(1.0)


def test_generic_residual_path_self_reference():
    # t - g(x) > 0 forces the checker to read the candidate's own past
    from sddlab.registry import const_phi_solution
    p = build_problem("const-phi")
    sol = const_phi_solution()
    assert sol.delayed is None
    assert max_abs_residual(p, sol, n=200) <= 1e-12


def test_residual_grid_shape():
    p = build_problem("key2026")
    sol = key_family({}, "yellow", 0.0)
    grid = residual_grid(p, sol, n=50)
    assert grid.shape == (50,)
    assert np.max(np.abs(grid)) <= 1e-12


def test_sup_difference_between_families():
    yellow = key_family({}, "yellow", 0.0)
    blue = key_family({}, "blue", 0.0)
    # over the shared window (0, sqrt(2)] the gap is 0.5 t**2
    assert sup_difference(yellow, blue) == pytest.approx(1.0, rel=1e-6)
    red = clamp_window(key_family({}, "red", 0.0), 3.0)
    assert sup_difference(yellow, red) == pytest.approx(0.5, rel=1e-6)


def test_sample_times_requires_finite_window():
    red = key_family({}, "red", 0.0)
    with pytest.raises(DomainError):
        red.sample_times(10)
    clamped = clamp_window(red, 3.0)
    ts = clamped.sample_times(10)
    assert len(ts) == 10
    assert ts[-1] == pytest.approx(3.0)
