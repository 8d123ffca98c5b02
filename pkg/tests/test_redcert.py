"""Red-solution certificates and the uniqueness check for the full form."""

import numpy as np
import pytest

from sddlab.errors import DomainError, InapplicableError
from sddlab.model import (Constant, DelaySpec, Full, InitialFunction,
                          PureDelay, SddProblem, Segment, delayed_argument,
                          eval_phi)
from sddlab.redcert import (CANDIDATE_EXISTS, IMPOSSIBLE_CASE1,
                            IMPOSSIBLE_NONLINEAR_G, LinearCandidate,
                            RedCertificate, red_certificate,
                            red_uniqueness_check, verify_red)
from sddlab.registry import build_problem


def test_key_certificate_and_verification():
    p = build_problem("key2026")
    cert = red_certificate(p)
    assert cert.verdict == CANDIDATE_EXISTS
    assert cert.s0 == -1.0
    assert cert.f_at_phi_s0 == 1.0
    assert (cert.candidate.intercept, cert.candidate.slope) == (1.0, 1.0)
    rep = verify_red(p, cert, horizon=1.0)
    assert rep.passed
    assert rep.max_residual <= 1e-9


def test_linear_ic_certificate_and_verification():
    p = build_problem("linear-ic")
    cert = red_certificate(p)
    assert cert.verdict == CANDIDATE_EXISTS
    assert cert.candidate.slope == 1.0
    assert verify_red(p, cert, horizon=0.5).passed


def test_nonlinear_delay_is_refused():
    cert = red_certificate(build_problem("quadratic-delay"))
    assert cert.verdict == IMPOSSIBLE_NONLINEAR_G
    assert cert.candidate is None
    assert cert.linearity_residual > 1e-3


def test_vanishing_rhs_is_refused():
    cert = red_certificate(build_problem("zero-f"))
    assert cert.verdict == IMPOSSIBLE_CASE1
    assert cert.f_at_phi_s0 == 0.0


def test_const_phi_delay_not_linear_through_origin():
    # x identically 1 gives g = |x| = 1 - t along the would-be sweep, while a
    # pinned argument needs g growing like 1 + t
    cert = red_certificate(build_problem("const-phi"))
    assert cert.verdict == IMPOSSIBLE_NONLINEAR_G
    assert cert.f_at_phi_s0 == -1.0


def test_certificate_rejects_full_form():
    with pytest.raises(InapplicableError):
        red_certificate(build_problem("driver1963"))


def test_verify_needs_a_candidate():
    cert = red_certificate(build_problem("zero-f"))
    p = build_problem("zero-f")
    with pytest.raises(InapplicableError):
        verify_red(p, cert)


def test_verify_flags_constant_candidate():
    phi = InitialFunction((Segment(-1.0, 0.0, Constant(1.0)),))
    p = SddProblem("flat", DelaySpec.linear(0.0, 1.0, h=1.0),
                   PureDelay(lambda u: u - 1.0), phi)
    cert = RedCertificate(-1.0, 0.0, CANDIDATE_EXISTS, LinearCandidate(1.0, 0.0), 0.0)
    rep = verify_red(p, cert, horizon=1.0)
    assert not rep.passed
    assert rep.max_residual <= 1e-12
    assert any("constant candidate" in f for f in rep.failures)


def test_verify_guards_delayed_argument_range():
    p = build_problem("linear-ic")
    bad = RedCertificate(-1.0, 1.0, CANDIDATE_EXISTS, LinearCandidate(1.0, 2.0), 0.0)
    with pytest.raises(DomainError, match="history range"):
        verify_red(p, bad, horizon=0.5)
    good = red_certificate(p)
    with pytest.raises(DomainError):
        verify_red(p, good, horizon=-1.0)


def test_driver_has_unique_red():
    rep = red_uniqueness_check(build_problem("driver1963"))
    assert rep.s0 == -4.0
    assert rep.phi_at_s0 == 2.0
    assert rep.start_slope == 1.0
    assert rep.verdict == "unique-red"
    assert rep.s_deviation <= 1e-8
    assert rep.end_state == pytest.approx(4.5, abs=1e-9)


def test_frozen_rhs_has_no_red():
    phi = InitialFunction((Segment(-1.0, 0.0, Constant(1.0)),))
    p = SddProblem("frozen", DelaySpec.absolute(1.0),
                   Full(lambda x, y: 0.0, lipschitz_in_first=True), phi)
    rep = red_uniqueness_check(p)
    assert rep.verdict == "no-red"
    assert rep.s_deviation == pytest.approx(0.5, abs=1e-12)


def test_uniqueness_needs_lipschitz_declaration():
    phi = InitialFunction((Segment(-1.0, 0.0, Constant(1.0)),))
    p = SddProblem("undeclared", DelaySpec.absolute(1.0),
                   Full(lambda x, y: -x, lipschitz_in_first=False), phi)
    with pytest.raises(InapplicableError):
        red_uniqueness_check(p)


@pytest.mark.parametrize("name", ["quadratic-delay", "zero-f", "const-phi"])
def test_no_red_slope_survives_brute_force(name):
    # sweep every slope: none yields a pinned delayed argument AND a residual
    # under 1e-6, which is what the impossible-* verdicts promise
    p = build_problem(name)
    phi0 = p.initial_value()
    ts = np.linspace(0.0, 0.1, 21)
    for m in np.arange(-10.0, 10.0 + 1e-9, 0.01):
        try:
            ss = [delayed_argument(p.delay, phi0 + m * t, t) for t in ts]
        except DomainError:
            continue
        if max(ss) - min(ss) > 1e-9:
            continue
        residual = max(abs(m - p.rhs_value(phi0 + m * t, eval_phi(p.phi, s)))
                       for t, s in zip(ts, ss))
        assert residual > 1e-6, (name, m)
