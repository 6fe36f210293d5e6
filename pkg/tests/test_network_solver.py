"""Windowed network solver: constants, closed forms, well-posedness checks."""

import dataclasses

import numpy as np
import pytest

import hjnet as hj
from hjnet.errors import CFLViolationError, ValidationError
from hjnet.network_solver import interior_bump

from conftest import make_path, make_single_edge, make_tripod


def test_m0_joins_datum_level_and_limiter():
    sc = make_tripod(50)
    assert hj.compute_m0(sc) == 2.0  # level(g=0) = 1, |c_center| = 2

    sc1 = make_single_edge(50, c=-1.0,
                           initial={"e": np.linspace(0.0, 1.0, 51)})
    assert hj.compute_m0(sc1) == pytest.approx(2.0, rel=1e-12)  # level of g = s

    sc0 = make_single_edge(50, c=-1.0)
    assert hj.compute_m0(sc0) == 1.0  # zero datum: level H(0) = 1 = |c|


def test_tripod_closed_form():
    sc = make_tripod(100)
    sol = hj.solve(sc)
    t, s = sol.grid.t_nodes(), sol.grid.s_nodes()
    exact = np.minimum(-t[:, None], -2.0 * t[:, None] + (1.0 - s)[None, :])
    err = max(float(np.max(np.abs(sol.fields[e] - exact)))
              for e in sol.fields)
    assert err < 0.01
    # flux limiter binds at the center from the first step on
    assert np.max(np.abs(sol.vertex["x0"] - (-2.0 * t))) < 1e-12
    assert np.max(np.abs(sol.vertex["x1"] - np.minimum(-t, -2.0 * t + 1.0))) < 0.01


def test_constant_datum_with_slack_limiter_decays_uniformly():
    sc = make_tripod(60, c_center=-1.0, c_leaf=-1.0,
                     initial={e: np.full(61, 0.4) for e in ("e1", "e2", "e3")})
    sol = hj.solve(sc)
    t = sol.grid.t_nodes()
    err = max(float(np.max(np.abs(sol.fields[e] - (0.4 - t)[:, None])))
              for e in sol.fields)
    assert err < 1e-12


def test_single_edge_network_agrees_with_free_arc_solve():
    sc = make_single_edge(80, horizon=1.0, c=-1.0)
    sol = hj.solve(sc)
    fld = hj.max_subsolution(hj.abs_hamiltonian(kappa=1.0), np.zeros(81),
                             hj.free(), hj.free(), sol.grid,
                             theta=sol.params.theta["e"])
    assert np.max(np.abs(sol.fields["e"] - fld.values)) < 1e-12


def test_solver_rejects_bad_inputs():
    sc = make_tripod(40)
    bad_lim = dict(sc.limiter_values(), x0=0.5)
    with pytest.raises(ValidationError):
        hj.solve(dataclasses.replace(sc, limiter=bad_lim))
    bad_g = {e: v.copy() for e, v in sc.initial.items()}
    bad_g["e2"] = bad_g["e2"] + 1.0  # breaks consistency at the center
    with pytest.raises(ValidationError):
        hj.solve(dataclasses.replace(sc, initial=bad_g))
    with pytest.raises(CFLViolationError):
        hj.plan_solve(dataclasses.replace(sc, dt=1.0))
    with pytest.raises(ValidationError):
        hj.plan_solve(dataclasses.replace(sc, cfl=1.5))


def test_explicit_time_step_is_honored():
    sc = dataclasses.replace(make_tripod(40), dt=0.002)
    params = hj.plan_solve(sc)
    assert params.dt <= 0.002 + 1e-15
    assert params.nt * params.dt == pytest.approx(sc.horizon, rel=1e-12)
    hj.solve(sc, params)


def test_verify_passes_on_solver_output():
    for sc in (make_tripod(60), make_path(60)):
        rep = hj.verify(hj.solve(sc))
        assert rep.ok, [c.name for c in rep.checks if not c.ok]


def test_verify_flags_forced_vertex_slope():
    sc = make_tripod(60)
    sol = hj.solve(sc)
    t = sol.grid.t_nodes()
    vert = {x: v.copy() for x, v in sol.vertex.items()}
    ramp = np.where(t > 1.0, 0.5 * (t - 1.0), 0.0)
    vert["x0"] = vert["x0"] + ramp  # slope becomes c_x + 0.5 past t = 1
    broken = dataclasses.replace(sol, vertex=vert)
    rep = hj.verify(broken)
    assert not rep["vertex_slope"].ok
    assert rep["vertex_slope"].witness == {"vertex": "x0"}
    assert not rep["vertex_continuity"].ok


def test_verify_flags_lifted_arc_field():
    sc = make_tripod(60)
    sol = hj.solve(sc)
    t = sol.grid.t_nodes()
    fields = {e: v.copy() for e, v in sol.fields.items()}
    fields["e2"] = fields["e2"] + 0.1 * (t > 0.5)[:, None]
    broken = dataclasses.replace(sol, fields=fields)
    rep = hj.verify(broken)
    assert not rep["vertex_continuity"].ok
    assert not rep["interior_residual"].ok


def test_contraction_constant_is_exact():
    sc = make_tripod(80)
    rep = hj.contraction_check(sc, {e: v + 0.3 for e, v in sc.initial.items()})
    assert rep.ok
    assert rep.sup_diff == pytest.approx(0.3, abs=1e-12)
    assert rep.ordered


def test_contraction_bump_bounded_by_its_height():
    sc = make_tripod(80)
    bump = interior_bump(80, 0.2)
    rep = hj.contraction_check(sc, {e: v + bump for e, v in sc.initial.items()})
    assert rep.ok
    assert rep.sup_diff <= 0.2 + 1e-11
    assert rep.ordered


def test_contraction_identical_data_gives_zero():
    sc = make_tripod(60)
    rep = hj.contraction_check(sc, {e: v.copy() for e, v in sc.initial.items()})
    assert rep.sup_diff == 0.0


def test_shift_identity():
    sc = make_tripod(80)
    for a in (0.0, 1.0, 5.0):
        if a == 0.0:
            sol = hj.solve(sc)
            again = hj.solve(sc)
            assert all(np.array_equal(sol.fields[e], again.fields[e])
                       for e in sol.fields)
            continue
        rep = hj.shift_check(sc, a)
        assert rep.ok, rep.max_dev


def test_stability_sweep_halves_monotonically():
    sc = make_tripod(60)
    rep = hj.stability_sweep(sc, eps_h=0.4, eps_c=0.2, eps_g=0.2, levels=3)
    assert rep.monotone_ok
    assert rep.diffs[0] > rep.diffs[-1] > 0.0
    only_g = hj.stability_sweep(sc, eps_g=0.2, levels=3)
    for k, d in enumerate(only_g.diffs):
        assert d <= 0.2 * 2.0 ** (-k) + 1e-11  # contraction bound per level
    none = hj.stability_sweep(sc, levels=2)
    assert none.diffs == [0.0, 0.0]


def test_restart_replays_byte_identically():
    sc = make_tripod(107)  # nt = 216, window 3 steps, half = 108 aligned
    equal, worst = hj.restart_check(sc)
    assert equal and worst == 0.0


def test_restart_rejects_misaligned_grids():
    sc = make_tripod(100)  # nt = 202, half = 101 not a multiple of 2
    with pytest.raises(ValidationError):
        hj.restart_check(sc)


def test_handcrafted_subsolutions_stay_below_the_solution():
    sc = make_tripod(80)
    sol = hj.solve(sc)
    t_rel = sol.grid.t_nodes() - sol.grid.t0
    eps = hj.default_epsilon(sol)
    # constant minus a steep ramp, at the worst admissible rate
    K = max(2.0, sol.constants.m0)
    ramp = {x: np.min([v.min() for v in sc.initial.values()]) - K * t_rel
            for x in sol.vertex}
    for x, w in ramp.items():
        assert np.all(w <= sol.vertex[x] + eps)
    for e in sol.fields:
        assert np.all(ramp["x0"][:, None] <= sol.fields[e] + eps)
    # strictified traces
    for x in sol.vertex:
        assert np.all(sol.vertex[x] - 0.1 * t_rel <= sol.vertex[x] + eps)


def test_lipschitz_bounds_do_not_grow_with_the_horizon():
    sols = {}
    for T in (1.0, 2.0):
        sc = make_tripod(80, horizon=T)
        sols[T] = hj.solve(sc)
    m0 = sols[2.0].constants.m0
    l0 = max(sols[2.0].constants.l_bound.values())
    for T, sol in sols.items():
        dtg = sol.grid.dt
        tslopes = np.diff(sol.fields["e1"], axis=0) / dtg
        sslopes = np.diff(sol.fields["e1"], axis=1) * sol.grid.ns
        assert np.min(tslopes) >= -m0 - 1e-9
        assert np.max(tslopes) <= 1e-12
        assert np.max(np.abs(sslopes)) <= l0 + 1e-9
    assert sols[1.0].constants.m0 == sols[2.0].constants.m0


def test_cyclic_network_solves_and_verifies():
    # cycles are allowed (only self-loops are rejected); coupling at the
    # vertices does not assume tree structure
    net = hj.build_network(["p", "q", "r"],
                           [("pq", "p", "q"), ("qr", "q", "r"), ("rp", "r", "p")])
    H = hj.abs_hamiltonian(kappa=1.0)
    fam = hj.family_from_edges(net, {"pq": H, "qr": H, "rp": H})
    ns = 90
    s = np.linspace(0.0, 1.0, ns + 1)
    sc = hj.Scenario(net, fam, {"p": -1.0, "q": -2.0, "r": -1.0},
                     {"pq": 0.3 * np.sin(np.pi * s) ** 2,
                      "qr": np.zeros(ns + 1), "rp": np.zeros(ns + 1)},
                     horizon=1.5, ns=ns, name="triangle")
    sol = hj.solve(sc)
    assert hj.verify(sol).ok
    t = sol.grid.t_nodes()
    assert np.max(np.abs(sol.vertex["q"] + 2.0 * t)) < 1e-12


def test_core_checks_hold_on_randomized_scenarios():
    # certificate, interior residuals, vertex slope cap and continuity are
    # robust across mixed Hamiltonian kinds and rough piecewise-linear data;
    # the time-monotonicity check is exercised separately since dissipative
    # schemes transiently overshoot at under-resolved convex datum kinks
    from conftest import random_scenario
    rng = np.random.default_rng(4242)
    core = ("interior_residual", "discr_certificate", "vertex_slope",
            "vertex_continuity", "inverse_consistency", "limiter")
    for trial in range(8):
        sc = random_scenario(rng, "tripod" if trial % 2 else "path", 64)
        rep = hj.verify(hj.solve(sc), checks=core)
        assert rep.ok, (trial, [c.name for c in rep.checks if not c.ok])


def test_negative_hamiltonians_solve_through_the_positivity_shift():
    # H = p^2 - 1 has critical value +1, so a positive limiter is legal and
    # the solution may rise in time at up to that rate
    net = hj.build_network(["a", "b", "c"], [("e1", "a", "b"), ("e2", "b", "c")])
    H = hj.quadratic_hamiltonian(kappa=-1.0)
    fam = hj.family_from_edges(net, {"e1": H, "e2": H})
    ns = 80
    s = np.linspace(0.0, 1.0, ns + 1)
    sc = hj.Scenario(net, fam, {"a": 0.5, "b": 0.3, "c": 1.0},
                     {"e1": 0.2 * np.sin(np.pi * s), "e2": np.zeros(ns + 1)},
                     horizon=1.0, ns=ns, name="shifted")
    sol = hj.solve(sc)
    assert sol.constants.shift == pytest.approx(1.0, abs=1e-5)
    rep = hj.verify(sol)
    assert rep.ok, [c.name for c in rep.checks if not c.ok]
    rise = np.max(np.diff(sol.vertex["b"])) / sol.grid.dt
    assert rise == pytest.approx(0.3, abs=1e-12)
    assert hj.shift_check(sc, 2.0).ok


def test_resolution_change_resamples_the_datum():
    sc = make_tripod(40, initial={e: np.linspace(0.0, 0.0, 41)
                                  for e in ("e1", "e2", "e3")})
    fine = hj.with_resolution(sc, 80)
    assert fine.ns == 80
    assert fine.initial["e1"].shape == (81,)


def test_solution_reverse_field_accessor():
    sc = make_path(40)
    sol = hj.solve(sc)
    assert np.array_equal(sol.field("a~"), sol.fields["a"][:, ::-1])
    ts = sol.vertex_series("v1")
    assert ts.values.shape == (sol.grid.nt + 1,)
