"""Batch front-end: solve scenario files, verify, dump CSVs and a report.

    hjnet run --scenario tripod.scn --out results [--t-final 2] [--ns 200]
              [--cfl 0.9] [--checks all|none|a,b,c] [--refine 2]
              [--dump-slices 0.5,1.0]
    hjnet oracle --oracle g|cone|refine|hopflax [--scenario ...] [--out ...]

Exit codes: 0 all enabled checks passed; 1 a check or oracle comparison
failed; 2 scenario parse/validation errors.  CSV numbers use 17 significant
digits, so outputs are byte-stable across runs and round-trip exactly.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from dataclasses import asdict

import numpy as np

from .arc_solver import Grid2D, cone_solution
from .errors import HJNetError, ValidationError
from .network_solver import (
    NetworkSolution,
    calibrate_epsilon,
    plan_solve,
    solve,
    verify,
)
from .scenario_io import parse_scenario_file
from .slope_cap import TimeSeries, apply_g, apply_g_bruteforce

__all__ = ["main", "write_solution_csv", "load_solution_csv"]


def _fmt(x):
    return format(float(x), ".17g")


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(c) if isinstance(c, str) else _fmt(c)
                              for c in row) + "\n")


def write_solution_csv(solution: NetworkSolution, outdir):
    os.makedirs(outdir, exist_ok=True)
    g = solution.grid
    s = g.s_nodes()
    t = g.t_nodes()

    def sol_rows():
        for eid in sorted(solution.fields):
            f = solution.fields[eid]
            for k in range(g.nt + 1):
                for i in range(g.ns + 1):
                    yield (eid, s[i], t[k], f[k, i])

    _write_csv(os.path.join(outdir, "solution.csv"),
               ["arc_id", "s", "t", "u"], sol_rows())

    def vert_rows():
        for x in sorted(solution.vertex):
            for k in range(g.nt + 1):
                yield (x, t[k], solution.vertex[x][k])

    _write_csv(os.path.join(outdir, "vertex_traces.csv"),
               ["vertex_id", "t", "u"], vert_rows())


def load_solution_csv(outdir, scenario, params=None) -> NetworkSolution:
    """Re-import a dumped solution for verification round-trips."""
    if params is None:
        params = plan_solve(scenario)
    g = Grid2D(params.ns, scenario.t0, params.dt, params.nt)
    fields = {}
    with open(os.path.join(outdir, "solution.csv"), "r", encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            eid, s_, t_, u_ = line.rstrip("\n").split(",")
            fields.setdefault(eid, []).append(float(u_))
    fields = {eid: np.array(v).reshape(g.nt + 1, g.ns + 1)
              for eid, v in fields.items()}
    vertex = {}
    with open(os.path.join(outdir, "vertex_traces.csv"), "r",
              encoding="utf-8") as fh:
        next(fh)
        for line in fh:
            x, t_, u_ = line.rstrip("\n").split(",")
            vertex.setdefault(x, []).append(float(u_))
    vertex = {x: np.array(v) for x, v in vertex.items()}
    probe = solve(scenario, params)  # recover constants deterministically
    return NetworkSolution(scenario=scenario, params=params, grid=g,
                           fields=fields, vertex=vertex,
                           constants=probe.constants)


def _dump_slices(solution, outdir, times):
    g = solution.grid
    s = g.s_nodes()
    t = g.t_nodes()

    def rows():
        for want in times:
            k = int(np.argmin(np.abs(t - want)))
            for eid in sorted(solution.fields):
                for i in range(g.ns + 1):
                    yield (eid, t[k], s[i], solution.fields[eid][k, i])

    _write_csv(os.path.join(outdir, "slices.csv"),
               ["arc_id", "t", "s", "u"], rows())


def _report(solution, rep, refine_details, elapsed, outdir):
    doc = {
        "scenario": solution.scenario.name,
        "constants": {
            "shift": solution.constants.shift,
            "m0": solution.constants.m0,
            "l_bound": solution.constants.l_bound,
            "theta": solution.params.theta,
            "dt": solution.params.dt,
            "ns": solution.params.ns,
            "nt": solution.params.nt,
            "delta": solution.constants.delta,
            "window_steps": solution.constants.window_steps,
            "windows": solution.constants.windows,
            "max_slope_seen": solution.constants.max_slope_seen,
        },
        "eps_scheme": rep.eps_scheme if rep is not None else None,
        "checks": [asdict(c) for c in (rep.checks if rep is not None else [])],
        "refine": refine_details,
        "timing": {"total_s": elapsed},
        "ok": bool(rep.ok) if rep is not None else True,
    }
    with open(os.path.join(outdir, "report.json"), "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=False)
        fh.write("\n")
    return doc


def _cmd_run(args):
    try:
        scenario, run = parse_scenario_file(
            args.scenario, ns=args.ns, horizon=args.t_final, cfl=args.cfl)
        params = plan_solve(scenario)
    except (ValidationError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    t_start = time.perf_counter()
    try:
        solution = solve(scenario, params)
    except HJNetError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2

    refine_details = None
    eps = None
    if args.refine:
        C, details = calibrate_epsilon(scenario, levels=args.refine + 1)
        g = solution.grid
        eps = 3.0 * C * (g.ds + g.dt)
        refine_details = {"C": C, "levels": details}

    checks = run.checks
    if args.checks is not None:
        if args.checks == "all":
            checks = None
        elif args.checks == "none":
            checks = ()
        else:
            checks = tuple(c.strip() for c in args.checks.split(",") if c.strip())
    rep = None
    if checks is None or checks:
        rep = verify(solution, eps_scheme=eps,
                     checks=None if checks is None else checks)

    write_solution_csv(solution, outdir)
    if args.dump_slices:
        times = [float(x) for x in args.dump_slices.split(",") if x]
        _dump_slices(solution, outdir, times)
    doc = _report(solution, rep, refine_details, time.perf_counter() - t_start,
                  outdir)
    for c in doc["checks"]:
        state = "PASS" if c["ok"] else "FAIL"
        print(f"{state} {c['name']} (margin {c['margin']:.3e})")
    if rep is not None and not rep.ok:
        return 1
    return 0


def _oracle_g(args, outdir):
    rng = np.random.default_rng(args.seed)
    n = args.length
    dt = args.dt
    vals = rng.integers(-2 ** 20, 2 ** 20, size=n) / 2.0 ** 10
    psi = TimeSeries(0.0, dt, vals)
    a = args.slope
    fast = apply_g(psi, a)
    brute = apply_g_bruteforce(psi, a)
    t = psi.times()
    _write_csv(os.path.join(outdir, "g_oracle.csv"),
               ["t", "psi", "capped", "capped_brute"],
               ((t[k], vals[k], fast.values[k], brute.values[k])
                for k in range(n)))
    same = np.array_equal(fast.values, brute.values)
    print(f"{'PASS' if same else 'FAIL'} g oracle (bitwise {'equal' if same else 'DIFFERENT'})")
    return 0 if same else 1


def _oracle_cone(args, outdir):
    rng = np.random.default_rng(args.seed)
    grid = Grid2D(args.grid_ns, 0.0, args.dt, args.nt)
    initial = rng.normal(size=grid.ns + 1)
    left = rng.normal(size=grid.nt + 1)
    right = rng.normal(size=grid.nt + 1)
    left[0] = right[0] = 0.0
    fld = cone_solution(args.speed, initial, left, right, grid)
    # independent brute force over every boundary point
    s = grid.s_nodes()
    t = grid.t_nodes()
    worst = 0.0
    for k in range(grid.nt + 1):
        for i in range(grid.ns + 1):
            best = -np.inf
            for j in range(grid.ns + 1):
                if abs(s[i] - s[j]) <= args.speed * (t[k] - t[0]):
                    best = max(best, initial[j])
            for l in range(grid.nt + 1):
                if t[l] <= t[k]:
                    if s[i] <= args.speed * (t[k] - t[l]):
                        best = max(best, left[l])
                    if 1.0 - s[i] <= args.speed * (t[k] - t[l]):
                        best = max(best, right[l])
            worst = max(worst, abs(best - fld.values[k, i]))
    _write_csv(os.path.join(outdir, "cone.csv"), ["arc_id", "t", "s", "u"],
               (("cone", t[k], s[i], fld.values[k, i])
                for k in range(grid.nt + 1) for i in range(grid.ns + 1)))
    print(f"{'PASS' if worst == 0.0 else 'FAIL'} cone oracle (max dev {worst:.3e})")
    return 0 if worst == 0.0 else 1


def _oracle_refine(args, outdir):
    scenario, _ = parse_scenario_file(args.scenario, ns=args.ns,
                                      horizon=args.t_final, cfl=args.cfl)
    C, details = calibrate_epsilon(scenario, levels=max(2, args.refine + 1))
    rows = []
    prev = None
    for lvl, d in enumerate(details):
        order = float("nan") if prev is None else np.log2(prev / d["diff"])
        rows.append((str(lvl), d["ns"], d["dt"], d["diff"], order))
        prev = d["diff"]
    _write_csv(os.path.join(outdir, "refine.csv"),
               ["level", "ns", "dt", "diff", "order"], rows)
    print(f"PASS refine oracle (C = {C:.6g})")
    return 0


def _oracle_hopflax(args, outdir):
    scenario, _ = parse_scenario_file(args.scenario, ns=args.ns,
                                      horizon=args.t_final, cfl=args.cfl)
    params = plan_solve(scenario)
    g = Grid2D(params.ns, scenario.t0, params.dt, params.nt)
    s = g.s_nodes()
    t = g.t_nodes()
    rows = []
    for arc in scenario.network.edge_arcs():
        H = scenario.hamiltonians[arc.id]
        if H.kind != "abs" or np.ptp(H.alpha) or np.ptp(H.beta) \
                or np.ptp(H.kappa) or H.beta[0] != 0.0:
            print("error: hopflax oracle needs H = alpha |p| + kappa with "
                  "constant coefficients", file=sys.stderr)
            return 2
        alpha, kappa = float(H.alpha[0]), float(H.kappa[0])
        gdat = np.asarray(scenario.initial[arc.id], dtype=float)
        for k, tk in enumerate(t):
            reach = alpha * (tk - t[0])
            for i, si in enumerate(s):
                lo, hi = max(0.0, si - reach), min(1.0, si + reach)
                val = _pl_min(gdat, s, lo, hi) - kappa * (tk - t[0])
                rows.append((arc.id, si, tk, val))
    _write_csv(os.path.join(outdir, "hopflax.csv"),
               ["arc_id", "s", "t", "u"], rows)
    print("PASS hopflax oracle")
    return 0


def _pl_min(vals, s, lo, hi):
    """Exact min of the piecewise-linear interpolant of vals over [lo, hi]."""
    inner = vals[(s >= lo) & (s <= hi)]
    cands = [np.interp(lo, s, vals), np.interp(hi, s, vals)]
    if inner.size:
        cands.append(float(np.min(inner)))
    return float(min(cands))


def _cmd_oracle(args):
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    try:
        if args.oracle == "g":
            return _oracle_g(args, outdir)
        if args.oracle == "cone":
            return _oracle_cone(args, outdir)
        if args.oracle == "refine":
            return _oracle_refine(args, outdir)
        if args.oracle == "hopflax":
            return _oracle_hopflax(args, outdir)
    except (ValidationError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    print(f"error: unknown oracle {args.oracle!r}", file=sys.stderr)
    return 2


def main(argv=None):
    parser = argparse.ArgumentParser(prog="hjnet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="solve a scenario file and verify")
    p_run.add_argument("--scenario", required=True)
    p_run.add_argument("--out", default="hjnet-out")
    p_run.add_argument("--t-final", type=float, default=None)
    p_run.add_argument("--ns", type=int, default=None)
    p_run.add_argument("--cfl", type=float, default=None)
    p_run.add_argument("--checks", default=None,
                       help="all | none | comma-separated check names")
    p_run.add_argument("--refine", type=int, default=0,
                       help="grid-doubling levels for tolerance calibration")
    p_run.add_argument("--dump-slices", default=None,
                       help="comma-separated times; writes slices.csv")
    p_run.set_defaults(func=_cmd_run)

    p_or = sub.add_parser("oracle", help="independent reference computations")
    p_or.add_argument("--oracle", required=True,
                      choices=("g", "cone", "refine", "hopflax"))
    p_or.add_argument("--out", default="hjnet-out")
    p_or.add_argument("--scenario", default=None)
    p_or.add_argument("--ns", type=int, default=None)
    p_or.add_argument("--t-final", type=float, default=None)
    p_or.add_argument("--cfl", type=float, default=None)
    p_or.add_argument("--refine", type=int, default=2)
    p_or.add_argument("--seed", type=int, default=0)
    p_or.add_argument("--length", type=int, default=512)
    p_or.add_argument("--dt", type=float, default=0.0078125)
    p_or.add_argument("--slope", type=float, default=-1.0)
    p_or.add_argument("--grid-ns", type=int, default=24)
    p_or.add_argument("--nt", type=int, default=24)
    p_or.add_argument("--speed", type=float, default=1.0)
    p_or.set_defaults(func=_cmd_oracle)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
