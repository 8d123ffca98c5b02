"""Color classification of trajectories and roughness analysis of histories.

A trajectory is colored by the motion of its delayed argument
s(t) = t - g(x(t)): red where sdot stays within tol_red of zero, yellow where
s increases, blue where it decreases.  sdot is evaluated through the identity
sdot = 1 - g'(x(t)) * xdot(t) on the node grid and merged into maximal runs.

The roughness side detects where an initial function fails to be Lipschitz
(one-sided difference quotients blowing up across scales) and fits one-sided
Hoelder exponents and coefficients by log-log least squares.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFitError, DomainError
from .model import DelaySpec, InitialFunction, eval_g_prime
from .steps import Trajectory

RED_TOL = 1e-8
QUOTIENT_SCALES = (1e-2, 1e-3, 1e-4, 1e-5, 1e-6)
BLOWUP_RATIO = 4.0
FIT_DECADES = (1.0, 5.0)   # deltas 10**-1 .. 10**-5, half-decade spacing
FIT_POINTS = 9


@dataclass(frozen=True)
class ColorSegment:
    t_start: float
    t_end: float
    color: str

    def as_dict(self) -> dict:
        return {"t_start": self.t_start, "t_end": self.t_end, "color": self.color}


@dataclass(frozen=True)
class HolderEstimate:
    """One-sided fit |phi(s0 +/- d) - phi(s0)| ~ coeff * d**exponent."""

    side: str
    coeff: float
    exponent: float
    fit_residual: float


def s_dot(traj: Trajectory, delay: DelaySpec, t: float) -> float:
    """Velocity of the delayed argument at t, via 1 - g'(x) * xdot."""
    x = traj.state_at(t)
    return 1.0 - eval_g_prime(delay, x) * traj.deriv_at(t)


def classify(traj: Trajectory, delay: DelaySpec, tol_red: float = RED_TOL) -> tuple[ColorSegment, ...]:
    """Color the trajectory into maximal runs on its node grid.

    Segment boundaries sit on nodes (the last node of each finishing run), so
    a branch time placed on the grid splits exactly there.  A zero-length
    leading run (a single boundary node, e.g. sdot = 0 right at a branch
    point) is dropped rather than reported as a measure-zero segment.
    """
    if len(traj.t) < 2:
        raise DomainError("classification needs at least two nodes")
    colors = []
    for t, x, m in zip(traj.t, traj.x, traj.xdot):
        sd = 1.0 - eval_g_prime(delay, float(x)) * float(m)
        if abs(sd) <= tol_red:
            colors.append("red")
        elif sd > 0.0:
            colors.append("yellow")
        else:
            colors.append("blue")

    segments: list[ColorSegment] = []
    run_start = float(traj.t[0])
    run_color = colors[0]
    for i in range(1, len(colors)):
        if colors[i] != run_color:
            boundary = float(traj.t[i - 1])
            if boundary > run_start:
                segments.append(ColorSegment(run_start, boundary, run_color))
            run_start = boundary
            run_color = colors[i]
    segments.append(ColorSegment(run_start, float(traj.t[-1]), run_color))
    return tuple(segments)


def _one_sided_quotients(phi: InitialFunction, theta: float, sign: float) -> list[float]:
    lo, hi = phi.span
    base = phi.evaluate(theta)
    out = []
    for d in QUOTIENT_SCALES:
        probe = theta + sign * d
        if probe < lo or probe > min(hi, 0.0):
            continue
        out.append(abs(phi.evaluate(probe) - base) / d)
    return out


def _blows_up(quotients: list[float]) -> bool:
    if len(quotients) < 3:
        return False
    increasing = all(b > a for a, b in zip(quotients, quotients[1:]))
    return increasing and quotients[-1] >= BLOWUP_RATIO * quotients[0]


def find_nonlipschitz(phi: InitialFunction) -> tuple[float, ...]:
    """Interior points where a one-sided difference quotient grows without bound.

    Candidates are segment junctions and power anchors interior to a segment;
    a point qualifies when either side's quotients increase monotonically
    across the scales 1e-2 .. 1e-6 with a clear overall blowup.
    """
    lo, hi = phi.span
    candidates = set(phi.junctions)
    for seg in phi.segments:
        anchor = getattr(seg.shape, "anchor", None)
        if anchor is not None and seg.lo < anchor < seg.hi:
            candidates.add(float(anchor))
    out = []
    for theta in sorted(candidates):
        if theta <= lo or theta >= min(hi, 0.0):
            continue
        if _blows_up(_one_sided_quotients(phi, theta, -1.0)) or \
           _blows_up(_one_sided_quotients(phi, theta, +1.0)):
            out.append(theta)
    return tuple(out)


def estimate_holder(phi: InitialFunction, s0: float, side: str) -> HolderEstimate:
    """Fit a one-sided Hoelder law at s0 by log-log least squares.

    Uses 9 half-decade scales spanning 1e-1 .. 1e-5.  The fitted exponent is
    clamped at 1 (anything smoother is still Lipschitz); a locally constant
    side has nothing to fit and raises DegenerateFitError.
    """
    if side not in ("left", "right"):
        raise DomainError(f"side must be 'left' or 'right', got {side!r}")
    lo, hi = phi.span
    if not (lo < s0 < min(hi, 0.0)):
        raise DomainError(f"s0 = {s0} not strictly inside ({lo}, 0)")
    sign = -1.0 if side == "left" else 1.0
    deltas = 10.0 ** -np.linspace(FIT_DECADES[0], FIT_DECADES[1], FIT_POINTS)
    base = phi.evaluate(s0)
    diffs = []
    used = []
    for d in deltas:
        probe = s0 + sign * d
        if probe < lo or probe > min(hi, 0.0):
            continue
        diffs.append(abs(phi.evaluate(probe) - base))
        used.append(d)
    if len(used) < 8:
        raise DomainError(f"s0 = {s0} too close to the domain edge for a {side}-side fit")
    diffs_arr = np.asarray(diffs)
    if np.any(diffs_arr < 1e-300):
        raise DegenerateFitError(f"phi is locally constant on the {side} of {s0}")
    logs_d = np.log(np.asarray(used))
    logs_v = np.log(diffs_arr)
    slope, intercept = np.polyfit(logs_d, logs_v, 1)
    fitted = slope * logs_d + intercept
    rms = float(np.sqrt(np.mean((logs_v - fitted) ** 2)))
    return HolderEstimate(side, float(np.exp(intercept)), float(min(slope, 1.0)), rms)
