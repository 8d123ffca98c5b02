"""Uniqueness side: slope certificates and the time-rescaled equation.

Two sufficient conditions are implemented.  The pointwise one looks at
q = g'(phi(0)) * F(phi(0), phi(s0)): when q != 1 the map whose fixed points
are the possible initial slopes is a contraction near the natural candidate
and the solution through zero is locally unique.  The regional one samples
q(x, y) = g'(x) * F(x, y) over a box around the initial data and certifies
sup q < 1 there.

When the pointwise certificate holds, the substitution s = t - g(x(t)) is
invertible near t = 0 and turns the problem into an ordinary, delay-free
system in the s variable,

    dw/ds = F(w, phi(s)) / (1 - g'(w) F(w, phi(s)))
    dt/ds = 1 / (1 - g'(w) F(w, phi(s)))

started from (w, t) = (phi(0), 0) at s = s0.  ``integrate_transformed`` runs
that system with RK4; converting back through ``TransformedPath.to_tx`` gives
an independent route to the solution that never evaluates a delayed state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (InapplicableError, IntegrationAbort,
                     NonDifferentiableError, SingularPivotError)
from .model import (SddProblem, effective_rhs, eval_g, eval_g_prime, eval_phi)

PIVOT_TOL = 1e-12
DEFAULT_MARGIN = 1e-9


@dataclass(frozen=True)
class UniquenessCertificate:
    q: float
    margin: float

    @property
    def verdict(self) -> str:
        return "unique" if abs(self.q - 1.0) > self.margin else "inconclusive"

    def as_dict(self) -> dict:
        return {"q": self.q, "margin": self.margin, "verdict": self.verdict}


def prop2_certificate(problem: SddProblem,
                      margin: float = DEFAULT_MARGIN) -> UniquenessCertificate:
    """Pointwise slope certificate q = g'(phi(0)) * F(phi(0), phi(s0))."""
    phi0 = problem.initial_value()
    s0 = -eval_g(problem.delay, phi0)
    q = eval_g_prime(problem.delay, phi0) * problem.rhs_value(phi0, eval_phi(problem.phi, s0))
    return UniquenessCertificate(q, margin)


@dataclass(frozen=True)
class RegionReport:
    eta: float
    sup_q: float
    holds: bool
    samples: int
    skipped_kinks: int
    exhaustive: bool = False

    def as_dict(self) -> dict:
        return {
            "eta": self.eta,
            "sup_q": self.sup_q,
            "holds": self.holds,
            "samples": self.samples,
            "skipped_kinks": self.skipped_kinks,
            "exhaustive": self.exhaustive,
        }


def prop1_region_check(problem: SddProblem, eta: float,
                       grid: int = 32) -> RegionReport:
    """Sample q(x, y) = g'(x) * F(x, y) over hull(phi) x [-eta, eta].

    The y box is closed, so an extremum attained at |y| = eta is seen.
    Sampled, not exhaustive: a certificate of the sampled maximum only.
    x samples where g has a kink contribute nothing (no one-sided calculus
    here) and are counted in ``skipped_kinks``.
    """
    if eta <= 0.0:
        raise ValueError("eta must be positive")
    if grid < 10:
        raise ValueError("grid must be at least 10")
    F = effective_rhs(problem)
    lo, hi = problem.phi.hull()
    xs = np.linspace(lo, hi, grid)
    ys = np.linspace(-eta, eta, grid)
    sup_q = -math.inf
    samples = 0
    skipped = 0
    for x in xs:
        try:
            gp = eval_g_prime(problem.delay, float(x))
        except NonDifferentiableError:
            skipped += 1
            continue
        for y in ys:
            sup_q = max(sup_q, gp * F(float(x), float(y)))
            samples += 1
    return RegionReport(eta, sup_q, sup_q < 1.0, samples, skipped)


def transformed_rhs(problem: SddProblem, s: float, w: float) -> tuple[float, float]:
    """Right side (dw/ds, dt/ds) of the rescaled system at (s, w).

    Only defined while s stays in the history window [-h, 0]; past s = 0 the
    delayed value is no longer read from phi and the substitution would need
    the solution itself.
    """
    h = problem.delay.h
    if s < -h - 1e-12 or s > 1e-12:
        raise ValueError(f"s={s} outside the history window [-{h}, 0]")
    y = eval_phi(problem.phi, min(s, 0.0))
    F = problem.rhs_value(w, y)
    den = 1.0 - eval_g_prime(problem.delay, w) * F
    if abs(den) < PIVOT_TOL:
        raise SingularPivotError(
            f"pivot 1 - g'(w) F vanished at s={s} (w={w}): the time change degenerates")
    return F / den, 1.0 / den


@dataclass(frozen=True)
class TransformedPath:
    s: np.ndarray
    t: np.ndarray
    w: np.ndarray
    problem: SddProblem

    def __post_init__(self):
        for a in (self.s, self.t, self.w):
            a.setflags(write=False)

    def to_tx(self) -> tuple[np.ndarray, np.ndarray]:
        """Drop back to the original variables (t, x)."""
        return self.t, self.w

    @property
    def endpoint(self) -> tuple[float, float]:
        return float(self.t[-1]), float(self.w[-1])


def integrate_transformed(problem: SddProblem, s_end: float,
                          step: float = 1e-3) -> TransformedPath:
    """RK4 on the rescaled system from (s0, phi(0), t=0) up to s_end.

    Gated on the pointwise certificate: with q = 1 the pivot is singular at
    the start and the substitution is not invertible, so the caller is told
    to stop rather than handed garbage.
    """
    cert = prop2_certificate(problem)
    if cert.verdict != "unique":
        raise InapplicableError(
            f"transformed integration needs the slope certificate (q={cert.q})")
    phi0 = problem.initial_value()
    s0 = -eval_g(problem.delay, phi0)
    if s_end < -problem.delay.h or s_end > 0.0:
        raise ValueError(f"s_end={s_end} outside [-{problem.delay.h}, 0]")
    if step <= 0.0:
        raise ValueError("step must be positive")

    ss = [s0]
    ts = [0.0]
    ws = [phi0]
    if s_end == s0:
        return TransformedPath(np.array(ss), np.array(ts), np.array(ws), problem)

    direction = 1.0 if s_end > s0 else -1.0
    n = math.ceil(abs(s_end - s0) / step)
    s, t, w = s0, 0.0, phi0
    for k in range(n):
        s_next = s0 + direction * (k + 1) * step
        if direction > 0:
            s_next = min(s_next, s_end)
        else:
            s_next = max(s_next, s_end)
        ds = s_next - s
        try:
            dw1, dt1 = transformed_rhs(problem, s, w)
            dw2, dt2 = transformed_rhs(problem, s + 0.5 * ds, w + 0.5 * ds * dw1)
            dw3, dt3 = transformed_rhs(problem, s + 0.5 * ds, w + 0.5 * ds * dw2)
            dw4, dt4 = transformed_rhs(problem, s_next, w + ds * dw3)
        except SingularPivotError as exc:
            partial = TransformedPath(np.array(ss), np.array(ts), np.array(ws), problem)
            raise IntegrationAbort(str(exc), partial) from exc
        w = w + ds / 6.0 * (dw1 + 2.0 * dw2 + 2.0 * dw3 + dw4)
        t = t + ds / 6.0 * (dt1 + 2.0 * dt2 + 2.0 * dt3 + dt4)
        s = s_next
        ss.append(s)
        ts.append(t)
        ws.append(w)
    return TransformedPath(np.array(ss), np.array(ts), np.array(ws), problem)


def transformed_to_csv(path: TransformedPath, out_path) -> None:
    with open(out_path, "w") as fh:
        fh.write("s,t,w\n")
        for s, t, w in zip(path.s, path.t, path.w):
            fh.write(f"{float(s)!r},{float(t)!r},{float(w)!r}\n")
