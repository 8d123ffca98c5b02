"""Named Cauchy problems addressable by key, with their closed-form bundles.

Five canonical keys plus two deliberately twisted variants used by the
certificate machinery.  Each entry knows how to build the problem for a flat
parameter mapping, which closed forms (if any) come with it, a working
horizon for clamping unbounded red windows, and the plane coefficients
(a, b) when the delay runs linearly over the states its solutions visit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

from .closed_forms import (ClosedFormSolution, clamp_window, driver_solutions,
                           example2010_solutions, key_family)
from .errors import DomainError
from .model import (Constant, DelaySpec, Full, InitialFunction, Linear,
                    PowerCusp, PowerLeft, PowerRight, PureDelay, SddProblem,
                    Segment)

Params = Mapping[str, float]


@dataclass(frozen=True)
class RegistryEntry:
    key: str
    summary: str
    defaults: tuple[tuple[str, float], ...]
    build: Callable[[dict], SddProblem]
    working_horizon: float
    plane: Optional[tuple[float, float]] = None
    supports_families: bool = False
    # closed_forms(params, taus) -> solutions; None when no exact forms are known
    closed_forms: Optional[Callable[[dict, tuple[float, ...]], tuple[ClosedFormSolution, ...]]] = None


def _build_driver(p: dict) -> SddProblem:
    delay = DelaySpec.linear(1.0, 0.0, h=6.0)
    rhs = Full(lambda x, y: -2.0 * y + 5.0, lipschitz_in_first=True)
    phi = InitialFunction((Segment(-6.0, 0.0, PowerCusp(-4.0, 2.0, 1.0, 0.5)),))
    return SddProblem("driver1963", delay, rhs, phi)


def _driver_forms(p: dict, taus) -> tuple[ClosedFormSolution, ...]:
    line, parabola = driver_solutions()
    return (clamp_window(line, 2.0), parabola)


def _build_example2010(p: dict) -> SddProblem:
    alpha = p["alpha"]
    if not (0.0 < alpha < 1.0):
        raise DomainError(f"alpha = {alpha} outside (0, 1)")
    phi = InitialFunction((
        Segment(-2.0, -1.0, PowerLeft(-1.0, 0.0, 1.0, alpha)),
        Segment(-1.0, 0.0, PowerRight(-1.0, 0.0, 1.0, alpha)),
    ))
    rhs = PureDelay(lambda u: u / (alpha - 1.0) + 1.0)
    return SddProblem("example2010", DelaySpec.absolute(2.0), rhs, phi)


def _example2010_forms(p: dict, taus) -> tuple[ClosedFormSolution, ...]:
    red, yellow, blue = example2010_solutions(p["alpha"])
    return (clamp_window(red, 1.0), yellow, blue)


def key_history(params: Params, h: float = 2.0) -> InitialFunction:
    """History of the branching example: rough power pieces meeting at -1,
    then a linear connector from -delta up to the value 1 at zero."""
    a, b = params["A"], params["B"]
    alpha, beta, delta = params["alpha"], params["beta"], params["delta"]
    phi_delta = -1.0 + a * (1.0 - delta) ** alpha
    slope = (1.0 - phi_delta) / delta
    return InitialFunction((
        Segment(-h, -1.0, PowerLeft(-1.0, -1.0, b, beta)),
        Segment(-1.0, -delta, PowerRight(-1.0, -1.0, a, alpha)),
        Segment(-delta, 0.0, Linear(slope, 1.0)),
    ))


def _build_key(p: dict) -> SddProblem:
    phi = key_history(p)
    return SddProblem("key2026", DelaySpec.absolute(2.0), PureDelay(lambda u: -u), phi)


def _key_forms(p: dict, taus: tuple[float, ...]) -> tuple[ClosedFormSolution, ...]:
    # one red line regardless of tau, then one yellow and one blue per tau
    out = [clamp_window(key_family(p, "red", 0.0), 3.0)]
    for tau in taus:
        out.append(key_family(p, "yellow", tau))
    for tau in taus:
        out.append(key_family(p, "blue", tau))
    return tuple(out)


def _build_linear_ic(p: dict) -> SddProblem:
    # h = 1 keeps |phi| inside the static delay range: the hull of 2*theta + 1
    # over [-1, 0] is [-1, 1], and the red line's pinned argument sits exactly
    # at s = -h
    phi = InitialFunction((Segment(-1.0, 0.0, Linear(2.0, 1.0)),))
    return SddProblem("linear-ic", DelaySpec.absolute(1.0), PureDelay(lambda u: -u), phi)


def _linear_ic_forms(p: dict, taus) -> tuple[ClosedFormSolution, ...]:
    red = ClosedFormSolution(
        "red", 0.0, lambda t: 1.0 + t, lambda t: 1.0, (0.0, math.inf), {},
        "linear-ic-red", delayed=lambda t: -1.0)
    return (clamp_window(red, 1.0),)


def _build_const_phi(p: dict) -> SddProblem:
    phi = InitialFunction((Segment(-2.0, 0.0, Constant(1.0)),))
    return SddProblem("const-phi", DelaySpec.absolute(2.0), PureDelay(lambda u: -u), phi)


def const_phi_solution(t_hi: float = 0.75) -> ClosedFormSolution:
    """Hand solution of the const-phi problem by two rounds of stepping.

    1 - t while the delayed argument is still negative (up to t = 1/2), then
    t - 2 + 2 exp(1/2 - t), valid until the delayed argument reaches 1/2 at
    t = 1/2 - ln(3/4).
    """
    t_max = 0.5 - math.log(0.75)
    if not (0.0 < t_hi <= t_max):
        raise DomainError(f"t_hi = {t_hi} outside (0, {t_max:.6f}]")

    def value(t: float) -> float:
        if t <= 0.5:
            return 1.0 - t
        return t - 2.0 + 2.0 * math.exp(0.5 - t)

    def derivative(t: float) -> float:
        if t <= 0.5:
            return -1.0
        return 1.0 - 2.0 * math.exp(0.5 - t)

    return ClosedFormSolution("yellow", 0.0, value, derivative, (0.0, t_hi),
                              {}, "const-phi-piecewise")


def _const_phi_forms(p: dict, taus) -> tuple[ClosedFormSolution, ...]:
    return (const_phi_solution(),)


def _build_quadratic(p: dict) -> SddProblem:
    # key-example data under g(x) = x**2; the squared range needs h = 4, so
    # the history is extended flat below -2 (PowerLeft value there is -2)
    base = key_history({"A": 1.0, "B": 1.0, "alpha": 0.5, "beta": 0.5, "delta": 0.5})
    phi = InitialFunction((Segment(-4.0, -2.0, Constant(-2.0)),) + base.segments)
    return SddProblem("quadratic-delay", DelaySpec.quadratic(4.0),
                      PureDelay(lambda u: -u), phi)


def _build_zero_f(p: dict) -> SddProblem:
    phi = InitialFunction((
        Segment(-2.0, -1.0, PowerLeft(-1.0, 0.0, 1.0, 0.5)),
        Segment(-1.0, 0.0, PowerRight(-1.0, 0.0, 1.0, 0.5)),
    ))
    return SddProblem("zero-f", DelaySpec.absolute(2.0), PureDelay(lambda u: u), phi)


REGISTRY: dict[str, RegistryEntry] = {
    "driver1963": RegistryEntry(
        "driver1963",
        "full-form problem with a square-root cusp history and two known solutions",
        (), _build_driver, working_horizon=2.0, plane=(1.0, 0.0),
        closed_forms=_driver_forms),
    "example2010": RegistryEntry(
        "example2010",
        "pure-delay problem with symmetric power history; three solutions split at zero",
        (("alpha", 0.5),), _build_example2010, working_horizon=1.0,
        plane=(1.0, 0.0), closed_forms=_example2010_forms),
    "key2026": RegistryEntry(
        "key2026",
        "branching example: two one-sided power behaviors at -1 feed yellow/blue families",
        (("A", 1.0), ("B", 1.0), ("alpha", 0.5), ("beta", 0.5), ("delta", 0.5)),
        _build_key, working_horizon=3.0, plane=(1.0, 0.0),
        supports_families=True, closed_forms=_key_forms),
    "linear-ic": RegistryEntry(
        "linear-ic",
        "Lipschitz straight-line history sharing the red solution of the branching example",
        (), _build_linear_ic, working_horizon=1.0, plane=(1.0, 0.0),
        closed_forms=_linear_ic_forms),
    "const-phi": RegistryEntry(
        "const-phi",
        "constant history, hand-solvable by two rounds of stepping",
        (), _build_const_phi, working_horizon=0.75, plane=(1.0, 0.0),
        closed_forms=_const_phi_forms),
    "quadratic-delay": RegistryEntry(
        "quadratic-delay",
        "branching-example data under a squared delay; no straight-line solution survives",
        (), _build_quadratic, working_horizon=0.5),
    "zero-f": RegistryEntry(
        "zero-f",
        "identity right side whose value at the history anchor vanishes",
        (), _build_zero_f, working_horizon=0.5),
}


def entry_for(key: str) -> RegistryEntry:
    try:
        return REGISTRY[key]
    except KeyError:
        known = ", ".join(sorted(REGISTRY))
        raise DomainError(f"unknown problem key {key!r}; known keys: {known}") from None


def resolve_params(key: str, params: Optional[Params] = None) -> dict:
    """Merge user parameters over the entry defaults, rejecting unknown names."""
    entry = entry_for(key)
    merged = dict(entry.defaults)
    for name, value in (params or {}).items():
        if name not in merged:
            accepted = ", ".join(n for n, _ in entry.defaults) or "none"
            raise DomainError(
                f"problem {key!r} does not take parameter {name!r} (accepted: {accepted})")
        merged[name] = float(value)
    return merged


def build_problem(key: str, params: Optional[Params] = None) -> SddProblem:
    entry = entry_for(key)
    return entry.build(resolve_params(key, params))


def solutions_for(key: str, params: Optional[Params] = None,
                  taus: tuple[float, ...] = (0.0,)) -> tuple[ClosedFormSolution, ...]:
    """Closed forms registered for the key; red windows come pre-clamped to the
    entry's working horizon.  Raises for keys with no known exact solutions."""
    entry = entry_for(key)
    if entry.closed_forms is None:
        raise DomainError(f"problem {key!r} has no registered closed forms")
    return entry.closed_forms(resolve_params(key, params), tuple(taus))
