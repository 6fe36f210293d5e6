"""Scenario parsing, CLI exit codes, CSV determinism, round-trips."""

import filecmp
import json

import numpy as np
import pytest

import hjnet as hj
from hjnet.cli import load_solution_csv, main
from hjnet.errors import ScenarioParseError
from hjnet.scenario_io import parse_scenario

TRIPOD = """
[vertices]
x0 0.0 0.0
x1 1.0 0.0
x2 -0.5 0.87
x3 -0.5 -0.87
[edges]
e1 x1 x0 abs alpha=1 beta=0 kappa=1
e2 x2 x0 abs alpha=1 beta=0 kappa=1
e3 x3 x0 abs alpha=1 beta=0 kappa=1
[limiter]
default -1
x0 -2
[initial]
e1 constant 0
e2 constant 0
e3 constant 0
[run]
T = 1.0
ns = 60
checks = all
"""

SINGLE = """
[vertices]
a
b
[edges]
e a b abs alpha=1 beta=0 kappa=1
[limiter]
default -1
[initial]
e linear 0 1
[run]
T = 1.0
ns = 50
"""


def test_parse_scenario_builds_the_problem():
    sc, run = parse_scenario(TRIPOD)
    assert sorted(sc.network.vertices) == ["x0", "x1", "x2", "x3"]
    assert len(sc.network.arcs) == 6
    assert sc.limiter_values()["x0"] == -2.0
    assert sc.limiter_values()["x1"] == -1.0
    assert run.ns == 60 and run.horizon == 1.0
    assert np.array_equal(sc.initial["e1"], np.zeros(61))


def test_parse_profiles_and_overrides():
    text = SINGLE.replace("linear 0 1", "bump 0.5 0.5 0.2")
    sc, _ = parse_scenario(text, ns=40)
    g = sc.initial["e"]
    assert g.shape == (41,)
    assert g[0] == 0.0 and g[-1] == 0.0
    assert np.max(g) == pytest.approx(0.5, abs=1e-12)

    text = SINGLE.replace("linear 0 1", "samples 0,1,0")
    sc, _ = parse_scenario(text, ns=4)
    assert np.allclose(sc.initial["e"], [0.0, 0.5, 1.0, 0.5, 0.0])


def test_parse_errors_carry_line_numbers():
    with pytest.raises(ScenarioParseError) as err:
        parse_scenario(TRIPOD.replace("e2 x2 x0 abs", "e2 x2 abs"))
    assert "line" in str(err.value)
    with pytest.raises(ScenarioParseError):
        parse_scenario("[vertices]\nv\n[edges]\n")
    with pytest.raises(ScenarioParseError):
        parse_scenario(TRIPOD.replace("[limiter]", "[limiterz]"))


def _write(tmp_path, text, name="scn.scn"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_run_solves_and_reports(tmp_path):
    scn = _write(tmp_path, TRIPOD)
    out = str(tmp_path / "out")
    code = main(["run", "--scenario", scn, "--out", out,
                 "--dump-slices", "0.25,0.75"])
    assert code == 0
    report = json.loads((tmp_path / "out" / "report.json").read_text())
    assert report["ok"]
    assert report["constants"]["m0"] == 2.0
    names = {c["name"] for c in report["checks"]}
    assert "discr_certificate" in names and "interior_residual" in names
    slices = (tmp_path / "out" / "slices.csv").read_text().splitlines()
    assert slices[0] == "arc_id,t,s,u"
    # 2 slice times x 3 edges x 61 nodes
    assert len(slices) == 1 + 2 * 3 * 61


def test_run_rejects_invalid_limiter(tmp_path):
    scn = _write(tmp_path, TRIPOD.replace("x0 -2", "x0 0"))
    assert main(["run", "--scenario", scn, "--out", str(tmp_path / "o")]) == 2


def test_run_rejects_parse_garbage(tmp_path):
    scn = _write(tmp_path, "[edges]\nnope\n")
    assert main(["run", "--scenario", scn, "--out", str(tmp_path / "o")]) == 2


def test_run_flags_underresolved_window(tmp_path):
    # at ns = 8 the time step cannot fit under the finite-speed bound, the
    # window check reports it, and the exit code turns nonzero
    scn = _write(tmp_path, TRIPOD)
    code = main(["run", "--scenario", scn, "--out", str(tmp_path / "o"),
                 "--ns", "8", "--checks", "window"])
    assert code == 1


def test_run_with_checks_none_skips_verification(tmp_path):
    scn = _write(tmp_path, TRIPOD)
    out = str(tmp_path / "nochecks")
    assert main(["run", "--scenario", scn, "--out", out,
                 "--checks", "none"]) == 0
    report = json.loads((tmp_path / "nochecks" / "report.json").read_text())
    assert report["checks"] == [] and report["ok"]


def test_run_is_byte_deterministic(tmp_path):
    scn = _write(tmp_path, TRIPOD)
    a, b = str(tmp_path / "a"), str(tmp_path / "b")
    assert main(["run", "--scenario", scn, "--out", a]) == 0
    assert main(["run", "--scenario", scn, "--out", b]) == 0
    assert filecmp.cmp(f"{a}/solution.csv", f"{b}/solution.csv", shallow=False)
    assert filecmp.cmp(f"{a}/vertex_traces.csv", f"{b}/vertex_traces.csv",
                       shallow=False)


def test_dumped_solution_roundtrips_through_verify(tmp_path):
    scn = _write(tmp_path, TRIPOD)
    out = str(tmp_path / "rt")
    assert main(["run", "--scenario", scn, "--out", out]) == 0
    report = json.loads((tmp_path / "rt" / "report.json").read_text())
    sc, _ = parse_scenario(TRIPOD)
    reloaded = load_solution_csv(out, sc)
    rep2 = hj.verify(reloaded)
    original = {c["name"]: c["ok"] for c in report["checks"]}
    roundtrip = {c.name: c.ok for c in rep2.checks}
    assert original == roundtrip


def test_refine_calibrates_epsilon(tmp_path):
    scn = _write(tmp_path, TRIPOD)
    out = str(tmp_path / "ref")
    assert main(["run", "--scenario", scn, "--out", out, "--ns", "40",
                 "--refine", "1"]) == 0
    report = json.loads((tmp_path / "ref" / "report.json").read_text())
    assert report["refine"]["C"] > 0.0
    assert report["eps_scheme"] == pytest.approx(
        3.0 * report["refine"]["C"]
        * (1.0 / 40 + report["constants"]["dt"]), rel=1e-12)


def test_oracle_g_and_cone(tmp_path):
    out = str(tmp_path / "og")
    assert main(["oracle", "--oracle", "g", "--out", out, "--seed", "5",
                 "--length", "400"]) == 0
    lines = (tmp_path / "og" / "g_oracle.csv").read_text().splitlines()
    assert lines[0] == "t,psi,capped,capped_brute"
    assert len(lines) == 401
    assert main(["oracle", "--oracle", "cone", "--out", out, "--seed", "2",
                 "--grid-ns", "10", "--nt", "10", "--dt", "0.05"]) == 0


def test_oracle_refine_and_hopflax(tmp_path):
    scn = _write(tmp_path, TRIPOD)
    out = str(tmp_path / "or")
    assert main(["oracle", "--oracle", "refine", "--scenario", scn, "--out",
                 out, "--ns", "30", "--refine", "2"]) == 0
    rows = (tmp_path / "or" / "refine.csv").read_text().splitlines()[1:]
    orders = [float(r.split(",")[4]) for r in rows[1:]]
    assert all(o >= 0.8 for o in orders)  # first-order level differences
    single = _write(tmp_path, SINGLE, "single.scn")
    assert main(["oracle", "--oracle", "hopflax", "--scenario", single,
                 "--out", out]) == 0
    rows = (tmp_path / "or" / "hopflax.csv").read_text().splitlines()[1:]
    # spot check the covering-line values for g(s) = s against the formula
    for row in rows[:2000:97]:
        _, s, t, u = row.split(",")
        s, t, u = float(s), float(t), float(u)
        assert u == pytest.approx(max(0.0, s - t) - t, abs=1e-12)


def test_oracle_hopflax_rejects_s_dependence(tmp_path):
    text = SINGLE.replace("abs alpha=1 beta=0 kappa=1",
                          "quadratic alpha=1 kappa=1")
    scn = _write(tmp_path, text, "quad.scn")
    assert main(["oracle", "--oracle", "hopflax", "--scenario", scn,
                 "--out", str(tmp_path / "oh")]) == 2
