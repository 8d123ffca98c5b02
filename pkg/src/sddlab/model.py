"""Problems with one discrete state-dependent delay.

A Cauchy problem couples a delay functional g bounded by the history depth h,
a right-hand side (pure delayed form  xdot(t) = f(x(t - g(x(t))))  or full
form  xdot(t) = F(x(t), x(t - g(x(t))))), and a continuous initial function
phi given piecewise on [-h, 0].  Everything here is immutable and evaluation
is pure, so instances can be shared freely between workers.

Two range conventions coexist on purpose.  ``eval_g`` enforces the static
contract g(x) in [0, h].  ``delayed_argument`` instead enforces that the
history query stays resolvable at time t, i.e. s = t - g(x) >= -h; along
solutions that march x beyond h the query point is still inside [-h, t] and
integration or residual checking remains well defined.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import DelayRangeError, DomainError, NonDifferentiableError

FD_STEP = 1e-7          # central-difference step for derivative fallbacks
FD_AGREE_TOL = 1e-5     # analytic and fallback derivatives must agree this well
JUNCTION_TOL = 1e-12    # value continuity required at segment junctions
EDGE_TOL = 1e-9         # forgiveness for float dust at interval edges
KINK_TOL = 1e-12        # how close to a kink counts as "at" the kink


# ---------------------------------------------------------------------------
# delay functionals


@dataclass(frozen=True)
class DelaySpec:
    """State-dependent delay x -> g(x) with history depth h.

    ``evaluate`` is the delay itself; ``derivative`` is optional and, when
    absent, a central finite difference with step ``FD_STEP`` is used.
    ``kinks`` lists points where g is not differentiable (0 for ``abs``).
    ``coeffs`` keeps constructor parameters for introspection (e.g. the
    (a, b) of a locally linear delay, used by the 3d plane check).
    """

    kind: str
    h: float
    evaluate: Callable[[float], float]
    derivative: Optional[Callable[[float], float]] = None
    kinks: tuple[float, ...] = ()
    coeffs: tuple[float, ...] = ()

    @staticmethod
    def absolute(h: float = 2.0) -> "DelaySpec":
        """g(x) = |x|, kinked at 0."""
        return DelaySpec("abs", h, abs, lambda x: math.copysign(1.0, x), (0.0,), (1.0, 0.0))

    @staticmethod
    def linear(a: float, b: float, h: float) -> "DelaySpec":
        """g(x) = a*x + b.  a = 0 gives a constant delay."""
        return DelaySpec("linear", h, lambda x: a * x + b, lambda x: a, (), (a, b))

    @staticmethod
    def quadratic(h: float = 2.0) -> "DelaySpec":
        """g(x) = x**2."""
        return DelaySpec("quadratic", h, lambda x: x * x, lambda x: 2.0 * x, ())

    @staticmethod
    def from_table(xs: Sequence[float], gs: Sequence[float], h: float) -> "DelaySpec":
        """Piecewise-linear delay interpolating the table (xs, gs).

        Queries outside the table clamp to the end values, matching np.interp.
        Interior knots are kinks of the interpolant.
        """
        xa = np.asarray(xs, dtype=float)
        ga = np.asarray(gs, dtype=float)
        if xa.ndim != 1 or xa.shape != ga.shape or len(xa) < 2:
            raise DomainError("delay table needs matching 1-d xs/gs with at least two rows")
        if not np.all(np.diff(xa) > 0):
            raise DomainError("delay table xs must be strictly increasing")

        def evaluate(x: float) -> float:
            return float(np.interp(x, xa, ga))

        def derivative(x: float) -> float:
            i = int(np.searchsorted(xa, x, side="right")) - 1
            i = min(max(i, 0), len(xa) - 2)
            return float((ga[i + 1] - ga[i]) / (xa[i + 1] - xa[i]))

        return DelaySpec("table", h, evaluate, derivative, tuple(float(v) for v in xa[1:-1]))

    @staticmethod
    def custom(fn: Callable[[float], float], h: float,
               derivative: Optional[Callable[[float], float]] = None,
               kinks: Sequence[float] = ()) -> "DelaySpec":
        return DelaySpec("custom", h, fn, derivative, tuple(float(k) for k in kinks))


def eval_g(delay: DelaySpec, x: float) -> float:
    """Evaluate the delay and enforce the static range [0, h]."""
    r = delay.evaluate(x)
    if r < -EDGE_TOL or r > delay.h + EDGE_TOL:
        raise DelayRangeError(
            f"g({x!r}) = {r!r} outside [0, {delay.h}] for delay kind {delay.kind!r}")
    return min(max(r, 0.0), delay.h)


def eval_g_prime(delay: DelaySpec, x: float) -> float:
    """Derivative of the delay at x; falls back to a central difference.

    Raises NonDifferentiableError at declared kinks (for ``abs``: x = 0).
    """
    for k in delay.kinks:
        if abs(x - k) <= KINK_TOL:
            raise NonDifferentiableError(
                f"delay kind {delay.kind!r} is not differentiable at x = {k!r}")
    if delay.derivative is not None:
        return delay.derivative(x)
    return (delay.evaluate(x + FD_STEP) - delay.evaluate(x - FD_STEP)) / (2.0 * FD_STEP)


def delayed_argument(delay: DelaySpec, x: float, t: float) -> float:
    """s = t - g(x), checked for resolvability of the history query.

    The delay must be nonnegative and the query point s may not fall below
    -h; g(x) itself is allowed to exceed h once t has advanced past the
    difference, since the query then still lands inside [-h, t].
    """
    g = delay.evaluate(x)
    if g < -EDGE_TOL:
        raise DelayRangeError(f"negative delay g({x!r}) = {g!r}")
    s = t - max(g, 0.0)
    if s < -delay.h - EDGE_TOL:
        raise DomainError(
            f"delayed argument {s!r} at t = {t!r} falls below -h = {-delay.h}")
    return s


# ---------------------------------------------------------------------------
# initial function segments

# Shape conventions, with theta the history variable:
#   PowerLeft   value - coeff*(anchor - theta)**exponent   for theta <= anchor
#   PowerRight  value + coeff*(theta - anchor)**exponent   for theta >= anchor
#   PowerCusp   value + coeff*|theta - anchor|**exponent   (two-sided cusp)
#   Linear      slope*theta + intercept
#   Constant    value
#   Polynomial  sum(c_k * theta**k)
# Power shapes are the Hoelder-rough building blocks; exponents are meant to
# lie strictly inside (0, 1) and coefficients to be strictly positive, which
# validate_problem reports on rather than the constructors enforcing, so that
# defective instances can be built and diagnosed.


@dataclass(frozen=True)
class PowerLeft:
    anchor: float
    value: float
    coeff: float
    exponent: float

    def evaluate(self, theta: float) -> float:
        base = max(self.anchor - theta, 0.0)
        return self.value - self.coeff * base ** self.exponent

    def violations(self, lo: float, hi: float) -> list[str]:
        out = _power_param_violations("PowerLeft", self.coeff, self.exponent)
        if hi > self.anchor + EDGE_TOL:
            out.append(f"PowerLeft segment extends right of its anchor {self.anchor}")
        return out


@dataclass(frozen=True)
class PowerRight:
    anchor: float
    value: float
    coeff: float
    exponent: float

    def evaluate(self, theta: float) -> float:
        base = max(theta - self.anchor, 0.0)
        return self.value + self.coeff * base ** self.exponent

    def violations(self, lo: float, hi: float) -> list[str]:
        out = _power_param_violations("PowerRight", self.coeff, self.exponent)
        if lo < self.anchor - EDGE_TOL:
            out.append(f"PowerRight segment extends left of its anchor {self.anchor}")
        return out


@dataclass(frozen=True)
class PowerCusp:
    """Two-sided power cusp, rising away from the anchor on both sides."""

    anchor: float
    value: float
    coeff: float
    exponent: float

    def evaluate(self, theta: float) -> float:
        return self.value + self.coeff * abs(theta - self.anchor) ** self.exponent

    def violations(self, lo: float, hi: float) -> list[str]:
        out = _power_param_violations("PowerCusp", self.coeff, self.exponent)
        if not (lo - EDGE_TOL <= self.anchor <= hi + EDGE_TOL):
            out.append(f"PowerCusp anchor {self.anchor} outside its segment [{lo}, {hi}]")
        return out


@dataclass(frozen=True)
class Linear:
    slope: float
    intercept: float

    def evaluate(self, theta: float) -> float:
        return self.slope * theta + self.intercept

    def violations(self, lo: float, hi: float) -> list[str]:
        return []


@dataclass(frozen=True)
class Constant:
    value: float

    def evaluate(self, theta: float) -> float:
        return self.value

    def violations(self, lo: float, hi: float) -> list[str]:
        return []


@dataclass(frozen=True)
class Polynomial:
    """Coefficients in increasing degree order: c0 + c1*theta + ..."""

    coeffs: tuple[float, ...]

    def evaluate(self, theta: float) -> float:
        acc = 0.0
        for c in reversed(self.coeffs):
            acc = acc * theta + c
        return acc

    def violations(self, lo: float, hi: float) -> list[str]:
        return []


def _power_param_violations(shape: str, coeff: float, exponent: float) -> list[str]:
    out = []
    if not (0.0 < exponent < 1.0):
        out.append(f"{shape} exponent {exponent} outside (0, 1)")
    if not coeff > 0.0:
        out.append(f"{shape} coeff {coeff} not strictly positive")
    return out


Shape = Union[PowerLeft, PowerRight, PowerCusp, Linear, Constant, Polynomial]


@dataclass(frozen=True)
class Segment:
    lo: float
    hi: float
    shape: Shape

    def evaluate(self, theta: float) -> float:
        return self.shape.evaluate(theta)

    def violations(self) -> list[str]:
        out = []
        if not self.lo < self.hi:
            out.append(f"segment [{self.lo}, {self.hi}] is empty or reversed")
        out.extend(self.shape.violations(self.lo, self.hi))
        return out


@dataclass(frozen=True)
class InitialFunction:
    """Ordered piecewise history covering [-h, 0]; junctions use the right segment."""

    segments: tuple[Segment, ...]

    def __post_init__(self):
        ordered = tuple(sorted(self.segments, key=lambda s: s.lo))
        if not ordered:
            raise DomainError("initial function needs at least one segment")
        object.__setattr__(self, "segments", ordered)
        object.__setattr__(self, "_los", tuple(s.lo for s in ordered))

    @property
    def span(self) -> tuple[float, float]:
        return (self.segments[0].lo, self.segments[-1].hi)

    @property
    def h(self) -> float:
        return -self.segments[0].lo

    @property
    def junctions(self) -> tuple[float, ...]:
        return tuple(s.lo for s in self.segments[1:])

    def evaluate(self, theta: float) -> float:
        lo = self.segments[0].lo
        if theta < lo - EDGE_TOL or theta > EDGE_TOL:
            raise DomainError(f"theta = {theta!r} outside the history domain [{lo}, 0]")
        th = min(max(theta, lo), 0.0)
        i = bisect_right(self._los, th) - 1
        if i < 0:
            i = 0
        seg = self.segments[i]
        if th > seg.hi + EDGE_TOL:
            raise DomainError(
                f"theta = {theta!r} falls in a coverage gap after segment ending {seg.hi}")
        return seg.evaluate(min(th, seg.hi))

    def hull(self, n: int = 257) -> tuple[float, float]:
        """Sampled range [min, max] of the history values."""
        lo, hi = self.span
        thetas = list(np.linspace(lo, min(hi, 0.0), n)) + list(self.junctions)
        vals = [self.evaluate(th) for th in thetas]
        return (min(vals), max(vals))

    def structure_violations(self, h: float) -> list[str]:
        out = []
        lo, hi = self.span
        if abs(lo + h) > EDGE_TOL:
            out.append(f"coverage starts at {lo}, expected -h = {-h}")
        if abs(hi) > EDGE_TOL:
            out.append(f"coverage ends at {hi}, expected 0")
        prev = self.segments[0]
        for seg in self.segments[1:]:
            gap = seg.lo - prev.hi
            if gap > EDGE_TOL:
                out.append(f"coverage gap ({prev.hi}, {seg.lo})")
            elif gap < -EDGE_TOL:
                out.append(f"overlapping segments near {seg.lo}")
            prev = seg
        return out

    def continuity_violations(self) -> list[str]:
        out = []
        prev = self.segments[0]
        for seg in self.segments[1:]:
            if abs(seg.lo - prev.hi) <= EDGE_TOL:
                jump = abs(prev.evaluate(prev.hi) - seg.evaluate(seg.lo))
                if jump > JUNCTION_TOL:
                    out.append(f"discontinuity {jump:.3e} at junction {seg.lo}")
            prev = seg
        return out


def eval_phi(phi: InitialFunction, theta: float) -> float:
    """Value of the initial function; junction points use the right-adjacent segment."""
    return phi.evaluate(theta)


# ---------------------------------------------------------------------------
# right-hand sides and problems


@dataclass(frozen=True)
class PureDelay:
    """xdot(t) = f(x(t - g(x(t))))."""

    f: Callable[[float], float]


@dataclass(frozen=True)
class Full:
    """xdot(t) = F(x(t), x(t - g(x(t)))).

    ``lipschitz_in_first`` is declared metadata: whether F is locally
    Lipschitz in its first argument.  It is trusted, not verified.
    """

    F: Callable[[float, float], float]
    lipschitz_in_first: bool = False


@dataclass(frozen=True)
class SddProblem:
    name: str
    delay: DelaySpec
    rhs: Union[PureDelay, Full]
    phi: InitialFunction

    @property
    def is_pure(self) -> bool:
        return isinstance(self.rhs, PureDelay)

    def rhs_value(self, x: float, delayed: float) -> float:
        if isinstance(self.rhs, PureDelay):
            return self.rhs.f(delayed)
        return self.rhs.F(x, delayed)

    def initial_value(self) -> float:
        return self.phi.evaluate(0.0)


def effective_rhs(problem: SddProblem) -> Callable[[float, float], float]:
    """(x, delayed) -> xdot as a single fast callable, closing over the rhs."""
    if isinstance(problem.rhs, PureDelay):
        f = problem.rhs.f
        return lambda x, delayed: f(delayed)
    return problem.rhs.F


# ---------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_problem(problem: SddProblem, n_phi: int = 200, n_deriv: int = 100) -> ValidationReport:
    """Report structural violations; an empty report means the problem is valid.

    Checks coverage of [-h, 0], junction continuity, shape parameter domains,
    the delay range over sampled history values, and agreement between the
    analytic delay derivative and the finite-difference fallback.
    """
    out: list[str] = []
    phi, delay = problem.phi, problem.delay

    for seg in phi.segments:
        out.extend(seg.violations())
    out.extend(phi.structure_violations(delay.h))
    out.extend(phi.continuity_violations())

    lo, hi = phi.span
    thetas = list(np.linspace(lo, min(hi, 0.0), n_phi)) + list(phi.junctions)
    for th in thetas:
        try:
            v = phi.evaluate(th)
        except DomainError as e:
            out.append(f"history evaluation failed at theta = {th:.6g}: {e}")
            continue
        try:
            eval_g(delay, v)
        except DelayRangeError as e:
            out.append(f"delay range breach at phi({th:.6g}) = {v:.6g}: {e}")

    if delay.derivative is not None:
        xlo, xhi = phi.hull()
        if xhi > xlo:
            for x in np.linspace(xlo, xhi, n_deriv):
                if any(abs(x - k) < 1e-3 for k in delay.kinks):
                    continue
                fd = (delay.evaluate(x + FD_STEP) - delay.evaluate(x - FD_STEP)) / (2.0 * FD_STEP)
                if abs(fd - delay.derivative(x)) > FD_AGREE_TOL:
                    out.append(
                        f"delay derivative disagrees with finite difference at x = {x:.6g}")

    return ValidationReport(tuple(out))
