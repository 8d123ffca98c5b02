"""Delay specs, history shapes, and problem validation."""

import math

import pytest

from sddlab.errors import (DelayRangeError, DomainError,
                           NonDifferentiableError)
from sddlab.model import (Constant, DelaySpec, Full, InitialFunction, Linear,
                          Polynomial, PowerCusp, PowerLeft, PowerRight,
                          PureDelay, SddProblem, Segment, delayed_argument,
                          effective_rhs, eval_g, eval_g_prime, eval_phi,
                          validate_problem)
from sddlab.registry import build_problem


def test_eval_g_identity_and_quadratic():
    assert eval_g(DelaySpec.linear(1.0, 0.0, h=2.0), 0.0) == 0.0
    assert eval_g(DelaySpec.quadratic(2.0), 0.5) == 0.25


def test_eval_g_enforces_static_range():
    ident = DelaySpec.linear(1.0, 0.0, h=2.0)
    with pytest.raises(DelayRangeError):
        eval_g(ident, -1.0)
    with pytest.raises(DelayRangeError):
        eval_g(ident, 2.5)
    # float dust inside the edge tolerance is clamped, not rejected
    assert eval_g(ident, -1e-12) == 0.0


def test_eval_g_prime_values_and_kink():
    ab = DelaySpec.absolute(2.0)
    assert eval_g_prime(ab, 1.0) == 1.0
    assert eval_g_prime(ab, -2.0) == -1.0
    assert eval_g_prime(DelaySpec.quadratic(2.0), 0.5) == pytest.approx(1.0)
    with pytest.raises(NonDifferentiableError):
        eval_g_prime(ab, 0.0)


def test_eval_g_prime_finite_difference_fallback():
    spec = DelaySpec.custom(lambda x: x * x, h=4.0)
    assert eval_g_prime(spec, 0.5) == pytest.approx(1.0, abs=1e-8)


def test_delayed_argument_driver_anchor():
    ident = DelaySpec.linear(1.0, 0.0, h=6.0)
    assert delayed_argument(ident, 4.0, 0.0) == -4.0
    with pytest.raises(DomainError):
        delayed_argument(ident, 8.0, 0.0)   # s = -8 below -h


def test_power_shapes():
    left = PowerLeft(anchor=-1.0, value=-1.0, coeff=1.0, exponent=0.5)
    right = PowerRight(anchor=-1.0, value=-1.0, coeff=1.0, exponent=0.5)
    cusp = PowerCusp(anchor=-4.0, value=2.0, coeff=1.0, exponent=0.5)
    assert left.evaluate(-1.0) == -1.0
    assert left.evaluate(-2.0) == -2.0
    assert right.evaluate(-0.75) == pytest.approx(-0.5)
    assert cusp.evaluate(-4.0) == 2.0
    assert cusp.evaluate(0.0) == 4.0
    assert cusp.evaluate(-6.0) == pytest.approx(2.0 + math.sqrt(2.0))


def test_simple_shapes():
    assert Linear(slope=2.0, intercept=1.0).evaluate(-0.5) == 0.0
    assert Constant(value=1.0).evaluate(-1.7) == 1.0
    assert Polynomial(coeffs=(1.0, 0.0, 2.0)).evaluate(2.0) == 9.0


def test_initial_function_junction_and_span():
    phi = InitialFunction(segments=(
        Segment(-2.0, -1.0, Linear(slope=0.0, intercept=3.0)),
        Segment(-1.0, 0.0, Linear(slope=-1.0, intercept=2.0)),
    ))
    assert phi.span == (-2.0, 0.0)
    assert phi.h == 2.0
    assert phi.junctions == (-1.0,)
    # the shared node belongs to the right-hand segment
    assert phi.evaluate(-1.0) == 3.0
    assert phi.evaluate(-1.5) == 3.0
    assert phi.evaluate(0.0) == 2.0
    with pytest.raises(DomainError):
        phi.evaluate(0.5)
    with pytest.raises(DomainError):
        phi.evaluate(-2.5)
    assert phi.evaluate(-2.0 - 1e-12) == 3.0   # edge dust clamps


def test_initial_function_gap_is_rejected():
    phi = InitialFunction(segments=(
        Segment(-2.0, -1.5, Constant(1.0)),
        Segment(-1.0, 0.0, Constant(1.0)),
    ))
    with pytest.raises(DomainError):
        phi.evaluate(-1.2)


def test_structure_violations():
    bad_exp = Segment(-2.0, 0.0, PowerRight(-2.0, 0.0, 1.0, 1.2))
    assert any("exponent" in v for v in bad_exp.violations())
    short = InitialFunction(segments=(Segment(-1.0, 0.0, Constant(1.0)),))
    assert any("coverage" in v for v in short.structure_violations(2.0))


def test_continuity_violations():
    jump = InitialFunction(segments=(
        Segment(-2.0, -1.0, Constant(1.0)),
        Segment(-1.0, 0.0, Constant(2.0)),
    ))
    assert jump.continuity_violations()
    smooth = build_problem("key2026").phi
    assert smooth.continuity_violations() == []


def test_hull_key_defaults():
    lo, hi = build_problem("key2026").phi.hull()
    assert lo == pytest.approx(-2.0)
    assert hi == pytest.approx(1.0)


def test_eval_phi_matches_segments():
    phi = build_problem("key2026").phi
    assert eval_phi(phi, 0.0) == 1.0
    assert eval_phi(phi, -1.0) == -1.0
    assert eval_phi(phi, -2.0) == -2.0


def test_problem_kinds():
    pure = build_problem("key2026")
    assert pure.is_pure
    assert pure.initial_value() == 1.0
    assert pure.rhs_value(5.0, -1.0) == 1.0   # f(u) = -u ignores x

    full = build_problem("driver1963")
    assert not full.is_pure
    assert full.rhs_value(0.0, 2.0) == 1.0    # F(x, y) = -2y + 5
    F = effective_rhs(full)
    assert F(123.0, 2.0) == 1.0


def test_validate_problem_clean_on_registry_defaults():
    for key in ("key2026", "driver1963", "example2010", "linear-ic",
                "const-phi", "quadratic-delay", "zero-f"):
        report = validate_problem(build_problem(key))
        assert report.ok, (key, report.violations)


def test_validate_problem_flags_static_range_breach():
    # B=2 drives phi(-2) = -3 past the reach of g on [0, h]; the validator
    # reports it even though solution-path evaluations never query g there
    report = validate_problem(build_problem("key2026", {"B": 2.0}))
    assert not report.ok


def test_validate_problem_flags_bad_exponent():
    phi = InitialFunction(segments=(
        Segment(-2.0, 0.0, PowerRight(-2.0, 1.0, 1.0, 1.2)),
    ))
    problem = SddProblem(
        name="bad", delay=DelaySpec.absolute(2.0),
        rhs=PureDelay(lambda u: -u), phi=phi)
    assert not validate_problem(problem).ok
