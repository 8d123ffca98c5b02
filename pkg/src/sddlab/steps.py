"""Method-of-steps integration: fixed-step RK4 with cubic Hermite dense output.

The stepper is deliberately plain: classical 4-stage Runge-Kutta with a fixed
step (final step shortened to land on t_end exactly), nodes carrying the
right-hand-side value as their derivative, and cubic Hermite interpolation
between nodes.  History queries resolve through the initial function for
s <= 0 and through the committed interpolant afterwards; a query inside the
step currently being formed extrapolates the previous Hermite piece by at
most one step and flags the event.  Identical inputs produce bitwise
identical trajectories.

Branches of a non-unique problem are reached by seeding: the right-hand side
loses its Lipschitz character exactly at the branch time, so integration is
started a nudge eps past it, displaced off the red line by the family's
leading term coeff*eps**exponent.
"""

from __future__ import annotations

import math
import warnings
from bisect import bisect_right
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .closed_forms import ClosedFormSolution, branch_exponent
from .errors import (DomainError, ExtrapolationWarning, IntegrationAbort)
from .model import (DelaySpec, InitialFunction, SddProblem, delayed_argument,
                    effective_rhs, eval_phi)

EDGE_TOL = 1e-9
SEED_MATCH_TOL = 1e-9


def _hermite_value(t0, t1, x0, x1, m0, m1, t):
    dt = t1 - t0
    th = (t - t0) / dt
    th2 = th * th
    th3 = th2 * th
    return ((2.0 * th3 - 3.0 * th2 + 1.0) * x0
            + (th3 - 2.0 * th2 + th) * dt * m0
            + (-2.0 * th3 + 3.0 * th2) * x1
            + (th3 - th2) * dt * m1)


def _hermite_deriv(t0, t1, x0, x1, m0, m1, t):
    dt = t1 - t0
    th = (t - t0) / dt
    th2 = th * th
    return ((6.0 * th2 - 6.0 * th) * x0 / dt
            + (3.0 * th2 - 4.0 * th + 1.0) * m0
            + (6.0 * th - 6.0 * th2) * x1 / dt
            + (3.0 * th2 - 2.0 * th) * m1)


@dataclass(frozen=True)
class Trajectory:
    """Immutable numeric solution: nodes (t_i, x_i, xdot_i) plus Hermite pieces."""

    t: np.ndarray
    x: np.ndarray
    xdot: np.ndarray
    t0: float
    problem: SddProblem
    notes: tuple[str, ...] = ()

    def __post_init__(self):
        for name in ("t", "x", "xdot"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)
        if len(self.t) < 1:
            raise DomainError("trajectory needs at least one node")

    @property
    def t_end(self) -> float:
        return float(self.t[-1])

    def _piece(self, t: float) -> int:
        i = int(np.searchsorted(self.t, t, side="right")) - 1
        return min(max(i, 0), len(self.t) - 2)

    def state_at(self, t: float) -> float:
        if t < self.t0 - EDGE_TOL or t > self.t_end + EDGE_TOL:
            raise DomainError(f"t = {t!r} outside trajectory range [{self.t0}, {self.t_end}]")
        if len(self.t) == 1:
            return float(self.x[0])
        tq = min(max(t, self.t0), self.t_end)
        i = self._piece(tq)
        return _hermite_value(self.t[i], self.t[i + 1], self.x[i], self.x[i + 1],
                              self.xdot[i], self.xdot[i + 1], tq)

    def deriv_at(self, t: float) -> float:
        if t < self.t0 - EDGE_TOL or t > self.t_end + EDGE_TOL:
            raise DomainError(f"t = {t!r} outside trajectory range [{self.t0}, {self.t_end}]")
        if len(self.t) == 1:
            return float(self.xdot[0])
        tq = min(max(t, self.t0), self.t_end)
        i = self._piece(tq)
        return _hermite_deriv(self.t[i], self.t[i + 1], self.x[i], self.x[i + 1],
                              self.xdot[i], self.xdot[i + 1], tq)

    def last_step(self) -> float:
        if len(self.t) < 2:
            return 0.0
        return float(self.t[-1] - self.t[-2])


def history_eval(traj: Trajectory, phi: InitialFunction, s: float) -> float:
    """Resolve a history query at s against phi and the trajectory.

    s <= 0 reads the initial function; (0, t0) on a seeded trajectory is an
    uncovered gap and errors; inside the node range the Hermite interpolant
    answers; at most one step beyond the last node the final piece is
    extrapolated with an ExtrapolationWarning.
    """
    if s <= 0.0:
        return eval_phi(phi, s)
    if s < traj.t0 - EDGE_TOL:
        raise DomainError(
            f"history at s = {s!r} falls in the uncovered gap (0, {traj.t0}) of a seeded run")
    if s <= traj.t_end + EDGE_TOL:
        return traj.state_at(s)
    if len(traj.t) >= 2 and s <= traj.t_end + traj.last_step() + EDGE_TOL:
        warnings.warn(f"extrapolating history one step past t = {traj.t_end}",
                      ExtrapolationWarning, stacklevel=2)
        n = len(traj.t)
        return _hermite_value(traj.t[n - 2], traj.t[n - 1], traj.x[n - 2], traj.x[n - 1],
                              traj.xdot[n - 2], traj.xdot[n - 1], s)
    raise DomainError(f"history at s = {s!r} beyond the trajectory end {traj.t_end}")


def delayed_arg(traj: Trajectory, delay: DelaySpec, t: float) -> float:
    """s(t) = t - g(x(t)) along a trajectory."""
    return delayed_argument(delay, traj.state_at(t), t)


def integrate(problem: SddProblem, t_end: float, step: float,
              seed: Optional[tuple[float, float]] = None) -> Trajectory:
    """March the problem from t = 0 (or a seed point) to t_end.

    A seed (t_start, x_start) starts the run off the default initial point;
    with t_start = 0 the seed must agree with phi(0).  If a delayed argument
    drops below -h the run aborts with IntegrationAbort carrying the partial
    trajectory.
    """
    if step <= 0.0:
        raise DomainError(f"step = {step} must be positive")
    if seed is None:
        t_start, x_start = 0.0, problem.initial_value()
    else:
        t_start, x_start = float(seed[0]), float(seed[1])
        if t_start < 0.0:
            raise DomainError(f"seed time {t_start} negative")
        if t_start == 0.0 and abs(x_start - problem.initial_value()) > SEED_MATCH_TOL:
            raise DomainError("seed at t = 0 disagrees with phi(0)")
    if t_end <= t_start:
        raise DomainError(f"t_end = {t_end} not beyond start {t_start}")

    phi = problem.phi
    delay_eval = problem.delay.evaluate
    h_depth = problem.delay.h
    rhs = effective_rhs(problem)
    phi_eval = phi.evaluate

    ts = [t_start]
    xs = [x_start]
    ms: list[float] = []
    extrapolations = 0

    def hist(s: float) -> float:
        nonlocal extrapolations
        if s <= 0.0:
            return phi_eval(s)
        if s < t_start - EDGE_TOL:
            raise DomainError(
                f"history at s = {s!r} falls in the uncovered gap (0, {t_start})")
        n = len(ts)
        last = ts[n - 1]
        if s <= last:
            i = bisect_right(ts, s) - 1
            if i >= n - 1:
                return xs[n - 1]
            return _hermite_value(ts[i], ts[i + 1], xs[i], xs[i + 1], ms[i], ms[i + 1], s)
        # inside the step being formed: extrapolate the previous piece, one step at most
        if n >= 2 and s <= last + step + EDGE_TOL:
            extrapolations += 1
            return _hermite_value(ts[n - 2], ts[n - 1], xs[n - 2], xs[n - 1],
                                  ms[n - 2], ms[n - 1], s)
        raise DomainError(f"history at s = {s!r} unreachable before the first committed step")

    def rhs_at(t: float, x: float) -> float:
        g = delay_eval(x)
        if g < -EDGE_TOL:
            raise DomainError(f"negative delay g({x!r}) = {g!r}")
        s = t - (g if g > 0.0 else 0.0)
        if s < -h_depth - EDGE_TOL:
            raise DomainError(f"delayed argument {s!r} below -h = {-h_depth}")
        return rhs(x, hist(s))

    def build(notes: tuple[str, ...]) -> Trajectory:
        return Trajectory(np.array(ts), np.array(xs), np.array(ms), t_start, problem, notes)

    try:
        ms.append(rhs_at(t_start, x_start))
        k = 0
        t = t_start
        x = x_start
        while t < t_end - 1e-12:
            t_next = t_start + (k + 1) * step
            if t_next > t_end:
                t_next = t_end
            dt = t_next - t
            half = 0.5 * dt
            k1 = ms[-1]
            k2 = rhs_at(t + half, x + half * k1)
            k3 = rhs_at(t + half, x + half * k2)
            k4 = rhs_at(t_next, x + dt * k3)
            x = x + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
            ts.append(t_next)
            xs.append(x)
            ms.append(rhs_at(t_next, x))
            t = t_next
            k += 1
    except DomainError as e:
        notes = (f"aborted: {e}",)
        if extrapolations:
            notes = notes + (f"extrapolated history on {extrapolations} stage queries",)
        if len(ms) < len(ts):
            ms.append(ms[-1] if ms else 0.0)
        raise IntegrationAbort(str(e), partial=build(notes)) from e

    notes: tuple[str, ...] = ()
    if extrapolations:
        notes = (f"extrapolated history on {extrapolations} stage queries",)
    return build(notes)


# ---------------------------------------------------------------------------
# branch seeding


@dataclass(frozen=True)
class BranchSpec:
    """Which solution branch to chase: family color, branch time, leading term.

    ``coeff`` and ``exponent`` describe the deviation coeff*(t-tau)**exponent
    off the red line; for red branches both are ignored.
    """

    family: str
    tau: float
    coeff: float
    exponent: float

    def __post_init__(self):
        if self.family not in ("red", "yellow", "blue"):
            raise DomainError(f"unknown family {self.family!r}")
        if self.tau < 0.0:
            raise DomainError(f"tau = {self.tau} negative")
        if self.family != "red":
            if self.coeff <= 0.0:
                raise DomainError(f"branch coeff {self.coeff} not strictly positive")
            if self.exponent <= 1.0:
                raise DomainError(f"branch exponent {self.exponent} must exceed 1")


def red_branch(tau: float = 0.0) -> BranchSpec:
    return BranchSpec("red", tau, 0.0, 1.0)


def _red_slope(problem: SddProblem) -> tuple[float, float]:
    """(phi(0), slope) of the problem's red line through t = 0."""
    x0 = problem.initial_value()
    s0 = delayed_argument(problem.delay, x0, 0.0)
    return x0, problem.rhs_value(x0, eval_phi(problem.phi, s0))


def _adjacent_power_segment(problem: SddProblem, s0: float, side: str):
    """The phi segment just left/right of s0, or None."""
    for seg in problem.phi.segments:
        if side == "right" and abs(seg.lo - s0) <= EDGE_TOL:
            return seg
        if side == "left" and abs(seg.hi - s0) <= EDGE_TOL:
            return seg
    return None


def seed_branch(problem: SddProblem, spec: BranchSpec, eps: float = 1e-4) -> tuple[float, float]:
    """Starting point (tau + eps, red(tau + eps) -/+ coeff*eps**exponent).

    Yellow seeds sit below the red line, blue seeds above.  The spec must be
    consistent with the history's one-sided power exponents next to s0, and
    eps must keep the seed inside the family window derived from the segment
    bounds.
    """
    if eps <= 0.0:
        raise DomainError(f"eps = {eps} must be positive")
    x0, slope = _red_slope(problem)
    base = x0 + (spec.tau + eps) * slope
    if spec.family == "red":
        return (spec.tau + eps, base)

    s0 = delayed_argument(problem.delay, x0, 0.0)
    side = "right" if spec.family == "yellow" else "left"
    seg = _adjacent_power_segment(problem, s0, side)
    expo = getattr(seg.shape, "exponent", None) if seg is not None else None
    if expo is None or not (0.0 < expo < 1.0):
        raise DomainError(
            f"no one-sided power history piece on the {side} of s0 = {s0} to feed a "
            f"{spec.family} branch")
    want = branch_exponent(expo)
    if abs(spec.exponent - want) > 1e-9:
        raise DomainError(
            f"branch exponent {spec.exponent} inconsistent with the history piece "
            f"(expected {want})")
    max_dev = (seg.hi - s0) if side == "right" else (s0 - seg.lo)
    sigma = (max_dev / spec.coeff) ** (1.0 / spec.exponent)
    if eps >= sigma:
        raise DomainError(f"eps = {eps} outside the family window (sigma = {sigma})")
    offset = spec.coeff * eps ** spec.exponent
    seeded = base - offset if spec.family == "yellow" else base + offset
    # the line itself repels both ways, so a seed that rounds back onto it
    # would pick its branch by floating-point accident; refuse instead
    if seeded == base:
        raise DomainError(
            f"offset {offset:.3e} at eps = {eps} is below float resolution of the "
            f"seed value; increase eps")
    return (spec.tau + eps, seeded)


# ---------------------------------------------------------------------------
# adapters and export


def trajectory_from_solution(sol: ClosedFormSolution, problem: SddProblem,
                             n: int = 257, t_max: float | None = None) -> Trajectory:
    """Render a closed form as an exact trajectory (values and derivatives).

    The node grid always contains the branch time tau so color changes land
    on a node.
    """
    lo, hi = sol.window
    if t_max is not None:
        hi = min(hi, t_max)
    if not math.isfinite(hi):
        raise DomainError(f"window of {sol.label!r} unbounded; pass t_max")
    ts = np.linspace(lo, hi, n)
    if lo < sol.tau < hi:
        ts = np.unique(np.concatenate([ts, [sol.tau]]))
    xs = np.array([sol.value(t) for t in ts])
    md = np.array([sol.derivative(t) for t in ts])
    return Trajectory(ts, xs, md, float(lo), problem, (f"rendered:{sol.label}",))


def trajectory_to_csv(traj: Trajectory, path) -> None:
    """Write nodes as CSV with columns t, x, xdot, s at full double precision."""
    delay = traj.problem.delay
    lines = ["t,x,xdot,s"]
    for t, x, m in zip(traj.t, traj.x, traj.xdot):
        s = delayed_argument(delay, float(x), float(t))
        lines.append(f"{float(t)!r},{float(x)!r},{float(m)!r},{float(s)!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
