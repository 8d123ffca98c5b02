"""Closed-form solutions and the residual checker that certifies them.

Every solution family here is written down explicitly (value and derivative),
and nothing downstream trusts the formulas: ``residual`` substitutes a
candidate into its problem's equation and reports the defect, which is the
independent check the test suite freezes its expectations against.

Color vocabulary, by the motion of the delayed argument s(t) = t - g(x(t)):
red means s is constant, yellow strictly increasing, blue strictly
decreasing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Mapping, Optional

import numpy as np

from .errors import DomainError
from .model import SddProblem, delayed_argument, eval_phi

WINDOW_TOL = 1e-12


def family_coefficient(coeff: float, exponent: float) -> float:
    """Branch growth constant for a unit-slope pure-delay rule.

    A one-sided history term coeff*|theta - s0|**exponent feeds back into a
    branch deviating from the red line like const*(t - tau)**(1/(1-exponent));
    this returns that constant, (coeff*(1-exponent))**(1/(1-exponent)).
    """
    if not (0.0 < exponent < 1.0):
        raise DomainError(f"exponent {exponent} outside (0, 1)")
    if coeff <= 0.0:
        raise DomainError(f"coeff {coeff} not strictly positive")
    return (coeff * (1.0 - exponent)) ** (1.0 / (1.0 - exponent))


def branch_exponent(exponent: float) -> float:
    """Growth exponent 1/(1-exponent) of the branch fed by a power history term."""
    if not (0.0 < exponent < 1.0):
        raise DomainError(f"exponent {exponent} outside (0, 1)")
    return 1.0 / (1.0 - exponent)


@dataclass(frozen=True)
class ClosedFormSolution:
    """An explicit solution with its window of guaranteed validity.

    ``window`` is (t_lo, t_hi); t_hi may be ``math.inf`` for solutions that
    never leave their validity regime, in which case samplers require an
    explicit horizon (see ``clamp_window``).
    """

    family: str                      # "red" | "yellow" | "blue"
    tau: float                       # where the branch peels off the red line
    value: Callable[[float], float]
    derivative: Callable[[float], float]
    window: tuple[float, float]
    params: Mapping[str, float]
    label: str
    # analytic delayed state x(t - g(x(t))), when the form admits one.  The
    # float route t - g(x) loses the delayed argument to cancellation, and a
    # Hoelder-alpha history turns that ulp into ulp**alpha, so forms that ride
    # a non-Lipschitz anchor supply the delayed value directly.
    delayed: Optional[Callable[[float], float]] = None

    def sample_times(self, n: int = 100) -> np.ndarray:
        lo, hi = self.window
        if not math.isfinite(hi):
            raise DomainError(f"window of {self.label!r} is unbounded; clamp it first")
        return np.linspace(lo, hi, n)


def clamp_window(sol: ClosedFormSolution, t_max: float) -> ClosedFormSolution:
    lo, hi = sol.window
    return replace(sol, window=(lo, min(hi, t_max)))


# ---------------------------------------------------------------------------
# the three registered problem families


def driver_solutions() -> tuple[ClosedFormSolution, ClosedFormSolution]:
    """Both known solutions of the driver1963 problem from t = 0.

    The line 4 + t keeps its delayed argument pinned at -4 (red); the
    parabola 4 + t - t**2 sweeps it from -4 up to 0 over [0, 2] (yellow).
    """
    line = ClosedFormSolution(
        family="red", tau=0.0,
        value=lambda t: 4.0 + t,
        derivative=lambda t: 1.0,
        window=(0.0, math.inf),
        params={}, label="driver1963-red",
        delayed=lambda t: 2.0)
    # s + 4 = t**2, and the cusp piece gives phi(s) = 2 + |s + 4|**(1/2) = 2 + t
    parabola = ClosedFormSolution(
        family="yellow", tau=0.0,
        value=lambda t: 4.0 + t - t * t,
        derivative=lambda t: 1.0 - 2.0 * t,
        window=(0.0, 2.0),
        params={}, label="driver1963-yellow",
        delayed=lambda t: 2.0 + t)
    return (line, parabola)


def example2010_solutions(alpha: float) -> tuple[ClosedFormSolution, ...]:
    """Three solutions of the example2010 problem branching at t = 0.

    All share x(0) = 1; the red line t + 1 holds its delayed argument at -1,
    and the two perturbed branches t + 1 -/+ t**(1/(1-alpha)) are yellow and
    blue respectively, valid until the delayed argument leaves the matching
    power piece of the history at t = 1.
    """
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha = {alpha} outside (0, 1)")
    q = branch_exponent(alpha)
    params = {"alpha": alpha}

    # yellow runs below the line, so s + 1 = +t**q and the odd-symmetric
    # history gives phi(s) = +t**(q-1); blue mirrors it
    red = ClosedFormSolution(
        "red", 0.0, lambda t: t + 1.0, lambda t: 1.0,
        (0.0, math.inf), params, "example2010-red",
        delayed=lambda t: 0.0)
    yellow = ClosedFormSolution(
        "yellow", 0.0,
        lambda t: t + 1.0 - t ** q,
        lambda t: 1.0 - q * t ** (q - 1.0) if t > 0.0 else 1.0,
        (0.0, 1.0), params, "example2010-yellow",
        delayed=lambda t: t ** (q - 1.0))
    blue = ClosedFormSolution(
        "blue", 0.0,
        lambda t: t + 1.0 + t ** q,
        lambda t: 1.0 + q * t ** (q - 1.0) if t > 0.0 else 1.0,
        (0.0, 1.0), params, "example2010-blue",
        delayed=lambda t: -(t ** (q - 1.0)))
    return (red, yellow, blue)


def _key_params(params: Mapping[str, float]) -> tuple[float, float, float, float, float]:
    a = float(params.get("A", 1.0))
    b = float(params.get("B", 1.0))
    alpha = float(params.get("alpha", 0.5))
    beta = float(params.get("beta", 0.5))
    delta = float(params.get("delta", 0.5))
    if a <= 0.0 or b <= 0.0:
        raise DomainError("history coefficients A, B must be strictly positive")
    for nm, e in (("alpha", alpha), ("beta", beta)):
        if not (0.0 < e < 1.0):
            raise DomainError(f"{nm} = {e} outside (0, 1)")
    if not (0.0 < delta < 1.0):
        raise DomainError(f"delta = {delta} outside (0, 1)")
    return a, b, alpha, beta, delta


def family_window(params: Mapping[str, float], family: str, tau: float,
                  h: float = 2.0) -> tuple[float, float]:
    """Validity window [0, t_hi] of a key-example family member.

    Yellow is limited by its delayed argument reaching the connector at
    -delta, blue by reaching the bottom of the history at -h; the red line
    never leaves its regime, so its t_hi is unbounded (inf) and callers clamp
    to a working horizon.
    """
    a, b, alpha, beta, delta = _key_params(params)
    if tau < 0.0:
        raise DomainError(f"tau = {tau} negative")
    if family == "red":
        return (0.0, math.inf)
    if family == "yellow":
        c = family_coefficient(a, alpha)
        return (0.0, tau + ((1.0 - delta) / c) ** (1.0 - alpha))
    if family == "blue":
        d = family_coefficient(b, beta)
        if h <= 1.0:
            raise DomainError(f"history depth h = {h} leaves no room below s0 = -1")
        return (0.0, tau + ((h - 1.0) / d) ** (1.0 - beta))
    raise DomainError(f"unknown family {family!r}")


def _branch_closures(tau: float, coeff: float, expo: float, sign: float,
                     hist_coeff: float, hist_expo: float):
    def value(t: float) -> float:
        if t <= tau:
            return 1.0 + t
        return 1.0 + t + sign * coeff * (t - tau) ** expo

    def derivative(t: float) -> float:
        if t <= tau:
            return 1.0
        return 1.0 + sign * coeff * expo * (t - tau) ** (expo - 1.0)

    # s + 1 = -sign * coeff*(t - tau)**expo, fed through the matching
    # one-sided history power; a yellow (sign -1) branch reads the rising
    # right piece, a blue one the falling left piece
    def delayed(t: float) -> float:
        if t <= tau:
            return -1.0
        w = coeff * (t - tau) ** expo
        return -1.0 - sign * hist_coeff * w ** hist_expo

    return value, derivative, delayed


def key_family(params: Mapping[str, float], family: str, tau: float,
               h: float = 2.0) -> ClosedFormSolution:
    """One member of the key-example solution bundle through x(0) = 1.

    Every member follows the red line 1 + t up to its branch time tau and
    then (yellow/blue) peels off by -/+ const*(t - tau)**(branch exponent);
    the constants come from ``family_coefficient`` applied to the matching
    one-sided history term.
    """
    a, b, alpha, beta, _ = _key_params(params)
    window = family_window(params, family, tau, h)
    stored = dict(params)
    stored["tau"] = tau
    label = f"key2026-{family}-tau{tau:g}"

    if family == "red":
        return ClosedFormSolution(
            "red", tau, lambda t: 1.0 + t, lambda t: 1.0, window, stored, label,
            delayed=lambda t: -1.0)
    if family == "yellow":
        value, deriv, delayed = _branch_closures(
            tau, family_coefficient(a, alpha), branch_exponent(alpha), -1.0,
            a, alpha)
        return ClosedFormSolution("yellow", tau, value, deriv, window, stored,
                                  label, delayed=delayed)
    if family == "blue":
        value, deriv, delayed = _branch_closures(
            tau, family_coefficient(b, beta), branch_exponent(beta), +1.0,
            b, beta)
        return ClosedFormSolution("blue", tau, value, deriv, window, stored,
                                  label, delayed=delayed)
    raise DomainError(f"unknown family {family!r}")


# ---------------------------------------------------------------------------
# the residual checker


def residual(problem: SddProblem, candidate: ClosedFormSolution, t: float) -> float:
    """Defect xdot(t) - rhs(t) of a candidate substituted into the problem.

    The delayed state is read from the initial function for s <= 0 and from
    the candidate itself for s > 0, so self-referential windows are checked
    against the candidate's own past.
    """
    lo, hi = candidate.window
    if t < lo - WINDOW_TOL or t > hi + WINDOW_TOL:
        raise DomainError(f"t = {t!r} outside candidate window [{lo}, {hi}]")
    x = candidate.value(t)
    s = delayed_argument(problem.delay, x, t)
    if candidate.delayed is not None:
        delayed = candidate.delayed(t)
    elif s <= 0.0:
        delayed = eval_phi(problem.phi, s)
    else:
        delayed = candidate.value(s)
    return candidate.derivative(t) - problem.rhs_value(x, delayed)


def residual_grid(problem: SddProblem, candidate: ClosedFormSolution,
                  n: int = 100, horizon: float | None = None) -> np.ndarray:
    """Residuals on n equispaced points of the (possibly clamped) window."""
    sol = candidate if horizon is None else clamp_window(candidate, horizon)
    return np.array([residual(problem, sol, t) for t in sol.sample_times(n)])


def max_abs_residual(problem: SddProblem, candidate: ClosedFormSolution,
                     n: int = 100, horizon: float | None = None) -> float:
    return float(np.max(np.abs(residual_grid(problem, candidate, n, horizon))))


def sup_difference(a: ClosedFormSolution, b: ClosedFormSolution,
                   n: int = 256, horizon: float | None = None) -> float:
    """Sup-norm distance between two candidates on their common window."""
    hi = min(a.window[1], b.window[1])
    if horizon is not None:
        hi = min(hi, horizon)
    lo = max(a.window[0], b.window[0])
    if not math.isfinite(hi):
        raise DomainError("common window unbounded; pass a horizon")
    if hi <= lo:
        return 0.0
    ts = np.linspace(lo, hi, n)
    return float(max(abs(a.value(t) - b.value(t)) for t in ts))
