"""Shared scenario builders for the test suite."""

import numpy as np
import pytest

import hjnet as hj


def make_tripod(ns, c_center=-2.0, c_leaf=-1.0, horizon=2.0, initial=None):
    """Star network: leaves x1..x3 joined at x0, H = |p| + 1 on every arc."""
    net = hj.build_network(
        ["x0", "x1", "x2", "x3"],
        [("e1", "x1", "x0"), ("e2", "x2", "x0"), ("e3", "x3", "x0")])
    H = hj.abs_hamiltonian(kappa=1.0)
    fam = hj.family_from_edges(net, {"e1": H, "e2": H, "e3": H})
    lim = {"x0": c_center, "x1": c_leaf, "x2": c_leaf, "x3": c_leaf}
    if initial is None:
        initial = {e: np.zeros(ns + 1) for e in ("e1", "e2", "e3")}
    return hj.Scenario(net, fam, lim, initial, horizon=horizon, ns=ns,
                       name="tripod")


def make_path(ns, horizon=2.0):
    """Two-edge path with one abs and one quadratic Hamiltonian."""
    net = hj.build_network(["v0", "v1", "v2"],
                           [("a", "v0", "v1"), ("b", "v1", "v2")])
    fam = hj.family_from_edges(net, {
        "a": hj.abs_hamiltonian(kappa=1.0),
        "b": hj.quadratic_hamiltonian(alpha=1.0, beta=0.0, kappa=1.0),
    })
    lim = {"v0": -1.0, "v1": -1.5, "v2": -1.0}
    s = np.linspace(0.0, 1.0, ns + 1)
    initial = {"a": 0.5 * s, "b": 0.5 * (1.0 - s)}
    return hj.Scenario(net, fam, lim, initial, horizon=horizon, ns=ns,
                       name="path")


def make_single_edge(ns, horizon=1.0, c=-1.0, initial=None):
    net = hj.build_network(["a", "b"], [("e", "a", "b")])
    fam = hj.family_from_edges(net, {"e": hj.abs_hamiltonian(kappa=1.0)})
    if initial is None:
        initial = {"e": np.zeros(ns + 1)}
    return hj.Scenario(net, fam, {"a": c, "b": c}, initial,
                       horizon=horizon, ns=ns, name="single")


def dyadic_series(rng, n, granularity=2.0 ** -10, span=2.0 ** 20):
    """Random values exactly representable at a coarse dyadic granularity."""
    return rng.integers(-int(span), int(span), size=n) * granularity


def random_scenario(rng, kind, ns, horizon=1.0):
    """Random star or path scenario with mixed Hamiltonian kinds."""
    if kind == "tripod":
        names = ["x0", "x1", "x2", "x3"]
        edges = [("e1", "x1", "x0"), ("e2", "x2", "x0"), ("e3", "x3", "x0")]
    else:
        names = ["v0", "v1", "v2"]
        edges = [("a", "v0", "v1"), ("b", "v1", "v2")]
    net = hj.build_network(names, edges)
    per = {}
    for eid, _, _ in edges:
        if rng.integers(2):
            per[eid] = hj.abs_hamiltonian(alpha=float(rng.uniform(0.5, 2.0)),
                                          beta=float(rng.uniform(-0.5, 0.5)),
                                          kappa=float(rng.uniform(0.5, 1.5)))
        else:
            per[eid] = hj.quadratic_hamiltonian(
                alpha=float(rng.uniform(0.5, 1.5)),
                beta=float(rng.uniform(-0.5, 0.5)),
                kappa=float(rng.uniform(0.5, 1.5)))
    fam = hj.family_from_edges(net, per)
    lim = {}
    for x in net.vertex_ids():
        cmin = min(hj.c_gamma(fam[a.id]) for a in hj.incident_arcs(net, x))
        lim[x] = cmin - float(rng.uniform(0.0, 0.8))
    vval = {x: float(rng.uniform(-0.5, 0.5)) for x in net.vertex_ids()}
    s = np.linspace(0.0, 1.0, ns + 1)
    g = {}
    for eid, a, b in edges:
        knots = rng.uniform(-0.4, 0.4, size=5)
        knots[0], knots[-1] = vval[a], vval[b]
        g[eid] = np.interp(s, np.linspace(0, 1, 5), knots)
    return hj.Scenario(net, fam, lim, g, horizon=horizon, ns=ns,
                       name=f"random-{kind}")


@pytest.fixture(scope="session")
def tripod_solutions():
    """Tripod solves at three refinement levels plus the fitted tolerance."""
    sols = {ns: hj.solve(make_tripod(ns)) for ns in (100, 200, 400)}
    C, details = hj.calibrate_epsilon(make_tripod(100), levels=3)
    return {"solutions": sols, "C": C, "details": details}


def eps_at(C, grid):
    """Scheme tolerance at a grid level from the fitted constant."""
    return 3.0 * C * (grid.ds + grid.dt)
