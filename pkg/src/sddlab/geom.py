"""Lift solutions into (t, s, x) space and measure surface membership.

Every solution of the delayed equation traces a curve on the surface
-t + s + g(x) = 0 once paired with its delayed argument s(t) = t - g(x(t)).
When g is linear, g(x) = a x + b, that surface is the plane
-t + s + a x + b = 0 and all solution curves of the problem are coplanar,
whatever color they are.  The residual helpers quantify both facts.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .closed_forms import ClosedFormSolution
from .model import DelaySpec, delayed_argument
from .steps import Trajectory


@dataclass(frozen=True)
class Curve3D:
    t: np.ndarray
    s: np.ndarray
    x: np.ndarray
    source: str
    problem_name: str

    def __post_init__(self):
        for a in (self.t, self.s, self.x):
            a.setflags(write=False)

    def __len__(self) -> int:
        return len(self.t)


def lift(source, delay: DelaySpec, grid: int = 256, t_max=None,
         problem_name: str = "") -> Curve3D:
    """Sample a solution and attach s(t) = t - g(x(t)) pointwise.

    ``source`` is a closed form (uses .value over its window, t_max required
    when the window is unbounded) or a computed trajectory (sampled over
    [t0, t_end]).
    """
    if grid < 2:
        raise ValueError("grid needs at least 2 points")
    if isinstance(source, ClosedFormSolution):
        lo, hi = source.window
        if np.isinf(hi):
            if t_max is None:
                raise ValueError(
                    f"{source.label}: unbounded window, pass t_max to lift it")
            hi = t_max
        elif t_max is not None:
            hi = min(hi, t_max)
        ts = np.linspace(lo, hi, grid)
        xs = np.array([source.value(float(t)) for t in ts])
        label = source.label
    elif isinstance(source, Trajectory):
        hi = source.t_end if t_max is None else min(t_max, source.t_end)
        ts = np.linspace(source.t0, hi, grid)
        xs = np.array([source.state_at(float(t)) for t in ts])
        label = "trajectory"
    else:
        raise TypeError(f"cannot lift {type(source).__name__}")
    ss = np.array([delayed_argument(delay, float(x), float(t))
                   for t, x in zip(ts, xs)])
    return Curve3D(ts, ss, xs, label, problem_name)


def surface_residual(curve: Curve3D, delay: DelaySpec) -> float:
    """max |-t + s + g(x)| along the curve; zero up to roundoff by construction."""
    vals = [abs(-t + s + delay.evaluate(float(x)))
            for t, s, x in zip(curve.t, curve.s, curve.x)]
    return float(max(vals))


def plane_residual(curve: Curve3D, a: float, b: float) -> float:
    """max |-t + s + a x + b| along the curve: distance-like residual to the
    plane that carries every solution when g(x) = a x + b."""
    vals = np.abs(-curve.t + curve.s + a * curve.x + b)
    return float(np.max(vals))


def curve_to_csv(curve: Curve3D, path) -> None:
    with open(path, "w") as fh:
        fh.write("t,s,x\n")
        for t, s, x in zip(curve.t, curve.s, curve.x):
            fh.write(f"{float(t)!r},{float(s)!r},{float(x)!r}\n")


def curve_to_json(curve: Curve3D, path) -> None:
    payload = {
        "source": curve.source,
        "problem": curve.problem_name,
        "points": len(curve),
        "t": [float(v) for v in curve.t],
        "s": [float(v) for v in curve.s],
        "x": [float(v) for v in curve.x],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2, ensure_ascii=False)
        fh.write("\n")
