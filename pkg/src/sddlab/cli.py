"""Command-line front end over the problem registry.

Subcommands: list | verify | branches | classify | certify | export3d | sweep.
Every run writes a JSON report (stable key order, UTF-8) plus any data files
into --out; reruns with identical inputs produce byte-identical files, which
is why wall time is printed to the console but never written to disk.
Exit code 0 means every verdict was a pass or an applicable outcome
(impossible-* and inconclusive are findings, not failures).
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path
from typing import Optional, Sequence

from .classify import classify as classify_trajectory
from .closed_forms import (branch_exponent, family_coefficient, family_window,
                           key_family, max_abs_residual, sup_difference)
from .errors import InapplicableError, IntegrationAbort, SddError
from .geom import curve_to_csv, lift, plane_residual, surface_residual
from .model import validate_problem
from .redcert import (CANDIDATE_EXISTS, red_certificate, red_uniqueness_check,
                      verify_red)
from .registry import REGISTRY, build_problem, entry_for, resolve_params, solutions_for
from .steps import (BranchSpec, integrate, red_branch, seed_branch,
                    trajectory_from_solution, trajectory_to_csv)
from .uniqueness import prop2_certificate

RESIDUAL_PASS = 1e-9
BRANCH_PASS = 1e-3
FUNNEL_SLACK = 1e-6
GEOM_PASS = 1e-12
DISTINCT_MIN = 1e-3

PASSING_VERDICTS = {"pass", "in-funnel", "classified", "unique", "inconclusive",
                    "unique-red", "no-red", "candidate-exists", "impossible-case1",
                    "impossible-nonlinear-g", "inapplicable"}

DEFAULT_FLAGS = {"step": 1e-3, "eps": 1e-4, "tol_red": 1e-8, "margin": 1e-9, "grid": 256}


def _parse_params(pairs: Optional[Sequence[str]]) -> dict:
    out: dict[str, float] = {}
    for raw in pairs or ():
        name, sep, value = raw.partition("=")
        if not sep or not name:
            raise SddError(f"--param expects name=value, got {raw!r}")
        try:
            out[name] = float(value)
        except ValueError:
            raise SddError(f"--param {name}: {value!r} is not a number") from None
    return out


def _out_dir(args) -> Path:
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _flags(args, names: Sequence[str]) -> dict:
    flags = dict(DEFAULT_FLAGS)
    for name in names:
        flags[name] = getattr(args, name)
    return flags


def _write_report(out_dir: Path, name: str, payload: dict) -> Path:
    path = out_dir / name
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2, ensure_ascii=False,
                  default=float)
        fh.write("\n")
    return path


def _report(command: str, key: str, params: dict, flags: dict) -> dict:
    return {
        "command": command,
        "problem": key,
        "params": params,
        "flags": flags,
        "outputs": [],
        "verdicts": {},
        "max_residuals": {},
    }


def _finish(report: dict, out_dir: Path, started: float) -> int:
    name = f"{report['problem']}-{report['command']}.json"
    path = _write_report(out_dir, name, report)
    failed = sorted(k for k, v in report["verdicts"].items()
                    if v.split(":")[0] not in PASSING_VERDICTS)
    for key in failed:
        print(f"FAIL {key}: {report['verdicts'][key]}", file=sys.stderr)
    print(f"report: {path}")
    print(f"wall time: {time.perf_counter() - started:.3f} s")
    return 1 if failed else 0


def cmd_list(args) -> int:
    for key in sorted(REGISTRY):
        entry = REGISTRY[key]
        schema = " ".join(f"{n}={d:g}" for n, d in entry.defaults)
        tail = f"  [params: {schema}]" if schema else ""
        print(f"{key}: {entry.summary}{tail}")
    return 0


def cmd_verify(args) -> int:
    started = time.perf_counter()
    params = _parse_params(args.param)
    taus = tuple(args.tau) if args.tau else (0.0, 0.3)
    merged = resolve_params(args.key, params)
    problem = build_problem(args.key, params)
    report = _report("verify", args.key, merged, _flags(args, ()))
    report["taus"] = list(taus)

    issues = validate_problem(problem).violations
    report["validation"] = list(issues)

    for sol in solutions_for(args.key, params, taus):
        r = max_abs_residual(problem, sol, n=100)
        verdict = "pass" if r <= RESIDUAL_PASS else "fail"
        report["max_residuals"][sol.label] = r
        report["verdicts"][sol.label] = verdict
        print(f"{sol.label}: max residual {r:.3e} -> {verdict}")
    return _finish(report, _out_dir(args), started)


def _branch_reference(merged: dict, family: str, tau: float):
    return key_family(merged, family, tau)


def cmd_branches(args) -> int:
    started = time.perf_counter()
    params = _parse_params(args.param)
    entry = entry_for(args.key)
    if not entry.supports_families:
        raise InapplicableError(f"problem {args.key!r} has no branch families")
    merged = resolve_params(args.key, params)
    problem = build_problem(args.key, params)
    out_dir = _out_dir(args)
    report = _report("branches", args.key, merged, _flags(args, ("step", "eps")))
    taus = tuple(args.tau)
    families = tuple(f.strip() for f in args.families.split(",") if f.strip())
    report["taus"] = list(taus)
    report["families"] = list(families)

    jobs: list[BranchSpec] = []
    if "red" in families:
        jobs.append(red_branch(0.0))
    for family in ("yellow", "blue"):
        if family not in families:
            continue
        coeff_name, expo_name = (("A", "alpha") if family == "yellow" else ("B", "beta"))
        coeff = family_coefficient(merged[coeff_name], merged[expo_name])
        expo = branch_exponent(merged[expo_name])
        for tau in taus:
            jobs.append(BranchSpec(family, tau, coeff, expo))

    # red integrations cannot hold the repelling line itself; they are judged
    # against the funnel spanned by the tau=0 branches instead
    red_ref = _branch_reference(merged, "red", 0.0)
    funnel = [_branch_reference(merged, fam, 0.0) for fam in ("yellow", "blue")]

    for spec in jobs:
        tag = spec.family if spec.family == "red" else f"{spec.family}-tau{spec.tau:g}"
        try:
            seed = seed_branch(problem, spec, args.eps)
        except SddError as exc:
            report["verdicts"][tag] = f"window-violation: {exc}"
            print(f"{tag}: {report['verdicts'][tag]}")
            continue
        if spec.family == "red":
            t_end = min([entry.working_horizon] + [f.window[1] for f in funnel])
        else:
            lo, hi = family_window(merged, spec.family, spec.tau)
            t_end = spec.tau + 0.5 * (hi - spec.tau)
        try:
            traj = integrate(problem, t_end, args.step, seed=seed)
        except IntegrationAbort as exc:
            report["verdicts"][tag] = f"aborted: {exc}"
            print(f"{tag}: {report['verdicts'][tag]}")
            continue

        if spec.family == "red":
            dev = 0.0
            margin = 0.0
            for t, x in zip(traj.t, traj.x):
                d = abs(x - red_ref.value(t))
                dev = max(dev, d)
                env = max(abs(f.value(t) - red_ref.value(t)) for f in funnel
                          if f.window[0] <= t <= f.window[1])
                margin = max(margin, d - env)
            verdict = "in-funnel" if margin <= FUNNEL_SLACK else "escaped-funnel"
            report.setdefault("funnel_margins", {})[tag] = margin
        else:
            ref = _branch_reference(merged, spec.family, spec.tau)
            dev = max(abs(x - ref.value(t)) for t, x in zip(traj.t, traj.x))
            verdict = "pass" if dev <= BRANCH_PASS else "fail"
        csv_path = out_dir / f"{args.key}-branch-{tag}.csv"
        trajectory_to_csv(traj, csv_path)
        report["outputs"].append(str(csv_path))
        report.setdefault("max_deviations", {})[tag] = dev
        report["verdicts"][tag] = verdict
        print(f"{tag}: max deviation {dev:.3e} -> {verdict}")
    return _finish(report, out_dir, started)


def cmd_classify(args) -> int:
    started = time.perf_counter()
    params = _parse_params(args.param)
    entry = entry_for(args.key)
    merged = resolve_params(args.key, params)
    problem = build_problem(args.key, params)
    report = _report("classify", args.key, merged, _flags(args, ("step", "tol_red")))
    taus = tuple(args.tau) if args.tau else (0.0, 0.3)

    curves = []
    if entry.closed_forms is not None:
        for sol in solutions_for(args.key, params, taus):
            traj = trajectory_from_solution(sol, problem)
            curves.append((sol.label, traj))
    else:
        traj = integrate(problem, entry.working_horizon, args.step)
        curves.append((f"{args.key}-integrated", traj))

    for label, traj in curves:
        segments = classify_trajectory(traj, problem.delay, tol_red=args.tol_red)
        colors = [seg.as_dict() for seg in segments]
        report.setdefault("segments", {})[label] = colors
        report["verdicts"][label] = "classified"
        shown = " ".join(f"{s.color}[{s.t_start:g},{s.t_end:g}]" for s in segments)
        print(f"{label}: {shown}")
    return _finish(report, _out_dir(args), started)


def cmd_certify(args) -> int:
    started = time.perf_counter()
    params = _parse_params(args.param)
    merged = resolve_params(args.key, params)
    problem = build_problem(args.key, params)
    entry = entry_for(args.key)
    report = _report("certify", args.key, merged, _flags(args, ("margin",)))

    if problem.is_pure:
        cert = red_certificate(problem)
        red_payload = cert.as_dict()
        report["verdicts"]["red"] = cert.verdict
        if cert.verdict == CANDIDATE_EXISTS:
            horizon = min(entry.working_horizon, 1.0)
            verification = verify_red(problem, cert, horizon=horizon)
            red_payload["verification"] = verification.as_dict()
            report["max_residuals"]["red-candidate"] = verification.max_residual
            if not verification.passed:
                report["verdicts"]["red"] = "candidate-refuted"
    else:
        try:
            check = red_uniqueness_check(problem)
            red_payload = check.as_dict()
            report["verdicts"]["red"] = check.verdict
        except InapplicableError as exc:
            red_payload = {"verdict": "inapplicable", "reason": str(exc)}
            report["verdicts"]["red"] = "inapplicable"
    report["red"] = red_payload

    try:
        u = prop2_certificate(problem, margin=args.margin)
        report["uniqueness"] = u.as_dict()
        report["verdicts"]["uniqueness"] = u.verdict
        q_text = f"q = {u.q:g}"
    except SddError as exc:
        report["uniqueness"] = {"verdict": "inapplicable", "reason": str(exc)}
        report["verdicts"]["uniqueness"] = "inapplicable"
        q_text = "q undefined"

    print(f"red: {report['verdicts']['red']}")
    print(f"uniqueness: {report['verdicts']['uniqueness']} ({q_text})")
    return _finish(report, _out_dir(args), started)


def cmd_export3d(args) -> int:
    started = time.perf_counter()
    params = _parse_params(args.param)
    entry = entry_for(args.key)
    merged = resolve_params(args.key, params)
    problem = build_problem(args.key, params)
    out_dir = _out_dir(args)
    report = _report("export3d", args.key, merged, _flags(args, ("grid",)))
    taus = tuple(args.tau) if args.tau else (0.0, 0.3)

    sols = solutions_for(args.key, params, taus)
    if args.which != "all":
        sols = tuple(s for s in sols if s.family == args.which)
        if not sols:
            raise SddError(f"no {args.which!r} curves among the registered solutions")

    for sol in sols:
        curve = lift(sol, problem.delay, grid=args.grid, problem_name=args.key)
        s_res = surface_residual(curve, problem.delay)
        entry_res = {"surface": s_res}
        ok = s_res <= GEOM_PASS
        if entry.plane is not None:
            a, b = entry.plane
            p_res = plane_residual(curve, a, b)
            entry_res["plane"] = p_res
            ok = ok and p_res <= GEOM_PASS
        csv_path = out_dir / f"{args.key}-curve-{sol.label}.csv"
        curve_to_csv(curve, csv_path)
        report["outputs"].append(str(csv_path))
        report["max_residuals"][sol.label] = entry_res
        report["verdicts"][sol.label] = "pass" if ok else "fail"
        shown = ", ".join(f"{k} {v:.2e}" for k, v in entry_res.items())
        print(f"{sol.label}: {shown} -> {report['verdicts'][sol.label]}")
    return _finish(report, out_dir, started)


def cmd_sweep(args) -> int:
    started = time.perf_counter()
    params = _parse_params(args.param)
    entry = entry_for(args.key)
    merged = resolve_params(args.key, params)
    problem = build_problem(args.key, params)
    taus = tuple(args.tau) if args.tau else (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
    report = _report("sweep", args.key, merged, _flags(args, ()))
    report["taus"] = list(taus)

    sols = solutions_for(args.key, params, taus)
    target = 2 * len(taus) + 1 if entry.supports_families else len(sols)
    verified = []
    for sol in sols:
        r = max_abs_residual(problem, sol, n=100)
        report["max_residuals"][sol.label] = r
        if r <= RESIDUAL_PASS:
            verified.append(sol)
        else:
            report["verdicts"][sol.label] = "fail"

    kept = []
    min_gap = None
    for sol in verified:
        gaps = [sup_difference(sol, other) for other in kept]
        if gaps:
            closest = min(gaps)
            min_gap = closest if min_gap is None else min(min_gap, closest)
        if all(g >= DISTINCT_MIN for g in gaps):
            kept.append(sol)

    report["distinct_verified"] = len(kept)
    report["target"] = target
    if min_gap is not None:
        report["min_pairwise_sup_difference"] = min_gap
    report["verdicts"]["cardinality"] = "pass" if len(kept) >= target else "fail"
    print(f"distinct verified solutions: {len(kept)} (target {target}) "
          f"-> {report['verdicts']['cardinality']}")
    return _finish(report, _out_dir(args), started)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sddlab",
        description="explore non-uniqueness of delay problems from the built-in registry")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("key", help="registry problem key (see `sddlab list`)")
        p.add_argument("--param", action="append", metavar="NAME=VALUE",
                       help="problem parameter, repeatable")
        p.add_argument("--out", default="./out", help="output directory (default ./out)")

    p = sub.add_parser("list", help="show registry keys and parameter schemas")
    p.set_defaults(handler=cmd_list)

    p = sub.add_parser("verify", help="check closed forms against the equation")
    common(p)
    p.add_argument("--tau", action="append", type=float,
                   help="branch time, repeatable (default 0 and 0.3)")
    p.set_defaults(handler=cmd_verify)

    p = sub.add_parser("branches", help="seed and integrate solution branches")
    common(p)
    p.add_argument("--tau", action="append", type=float, default=[],
                   help="branch time, repeatable (default: red branch only)")
    p.add_argument("--families", default="red,yellow,blue",
                   help="comma-separated families to run (default all)")
    p.add_argument("--eps", type=float, default=DEFAULT_FLAGS["eps"])
    p.add_argument("--step", type=float, default=DEFAULT_FLAGS["step"])
    p.set_defaults(handler=cmd_branches)

    p = sub.add_parser("classify", help="color solutions by delayed-argument monotonicity")
    common(p)
    p.add_argument("--tau", action="append", type=float,
                   help="branch time for rendered closed forms (default 0 and 0.3)")
    p.add_argument("--step", type=float, default=DEFAULT_FLAGS["step"])
    p.add_argument("--tol-red", dest="tol_red", type=float, default=DEFAULT_FLAGS["tol_red"])
    p.set_defaults(handler=cmd_classify)

    p = sub.add_parser("certify", help="emit red-solution and uniqueness certificates")
    common(p)
    p.add_argument("--margin", type=float, default=DEFAULT_FLAGS["margin"])
    p.set_defaults(handler=cmd_certify)

    p = sub.add_parser("export3d", help="export (t, s, x) curves with residual checks")
    common(p)
    p.add_argument("--which", choices=("all", "red", "yellow", "blue"), default="all")
    p.add_argument("--tau", action="append", type=float,
                   help="branch time, repeatable (default 0 and 0.3)")
    p.add_argument("--grid", type=int, default=DEFAULT_FLAGS["grid"])
    p.set_defaults(handler=cmd_export3d)

    p = sub.add_parser("sweep", help="count distinct verified solutions over a tau grid")
    common(p)
    p.add_argument("--tau", action="append", type=float,
                   help="tau grid point, repeatable (default six points over [0, 1])")
    p.set_defaults(handler=cmd_sweep)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (SddError, IntegrationAbort) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
