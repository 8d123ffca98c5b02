"""Curves in (t, s, x) space and their surface/plane residuals."""

import json

import numpy as np
import pytest

from sddlab.closed_forms import clamp_window, key_family
from sddlab.geom import (Curve3D, curve_to_csv, curve_to_json, lift,
                         plane_residual, surface_residual)
from sddlab.registry import build_problem, driver_solutions
from sddlab.steps import integrate


def test_lift_closed_form():
    p = build_problem("key2026")
    yellow = key_family({}, "yellow", 0.0)
    curve = lift(yellow, p.delay, grid=64, problem_name="key2026")
    assert len(curve) == 64
    assert curve.source == "key2026-yellow-tau0"
    assert curve.t[0] == 0.0
    assert curve.s[0] == pytest.approx(-1.0)


def test_lift_unbounded_window_needs_t_max():
    p = build_problem("key2026")
    red = key_family({}, "red", 0.0)
    with pytest.raises(ValueError, match="t_max"):
        lift(red, p.delay)
    curve = lift(red, p.delay, grid=2, t_max=2.0)
    assert len(curve) == 2
    assert list(curve.t) == [0.0, 2.0]


def test_lift_trajectory():
    p = build_problem("const-phi")
    traj = integrate(p, 0.5, 1e-2)
    curve = lift(traj, p.delay, grid=32)
    assert curve.source == "trajectory"
    assert surface_residual(curve, p.delay) <= 1e-12


def test_lift_rejects_unknown_source():
    p = build_problem("key2026")
    with pytest.raises(TypeError):
        lift(42, p.delay)
    with pytest.raises(ValueError):
        lift(key_family({}, "yellow", 0.0), p.delay, grid=1)


def test_surface_residual_detects_corruption():
    p = build_problem("key2026")
    curve = lift(key_family({}, "yellow", 0.0), p.delay, grid=32)
    assert surface_residual(curve, p.delay) <= 1e-12
    s_bad = curve.s.copy()
    s_bad[7] += 1e-3
    bad = Curve3D(curve.t, s_bad, curve.x, curve.source, curve.problem_name)
    assert surface_residual(bad, p.delay) == pytest.approx(1e-3, abs=1e-12)


def test_driver_curves_are_coplanar():
    p = build_problem("driver1963")
    line, parabola = driver_solutions()
    for sol in (clamp_window(line, 2.0), parabola):
        curve = lift(sol, p.delay, grid=100, problem_name="driver1963")
        assert plane_residual(curve, 1.0, 0.0) <= 1e-12


def test_wrong_plane_grows_with_t():
    p = build_problem("key2026")
    red = clamp_window(key_family({}, "red", 0.0), 2.0)
    curve = lift(red, p.delay, grid=100)
    # with a = 2 the leftover is exactly x = 1 + t
    assert plane_residual(curve, 2.0, 0.0) == pytest.approx(3.0, abs=1e-12)
    short = lift(clamp_window(key_family({}, "red", 0.0), 1.0), p.delay, grid=100)
    assert plane_residual(short, 2.0, 0.0) == pytest.approx(2.0, abs=1e-12)


def test_curve_csv_and_json(tmp_path):
    p = build_problem("key2026")
    curve = lift(key_family({}, "blue", 0.3), p.delay, grid=16, problem_name="key2026")
    csv_path = tmp_path / "c.csv"
    curve_to_csv(curve, csv_path)
    lines = csv_path.read_text().strip().split("\n")
    assert lines[0] == "t,s,x"
    assert len(lines) == 17
    t, s, x = (float(v) for v in lines[1].split(","))
    assert (t, x) == (0.0, 1.0)

    json_path = tmp_path / "c.json"
    curve_to_json(curve, json_path)
    payload = json.loads(json_path.read_text())
    assert payload["points"] == 16
    assert payload["problem"] == "key2026"
    assert payload["source"] == "key2026-blue-tau0.3"
    assert len(payload["t"]) == 16
