import math
import os
import subprocess

import numpy as np
import pytest

import esdsim


def test_kernels_worked_example():
    k = esdsim.evaluate_kernels(math.pi / 2, esdsim.SystemParams(1.0, 1.0, 1.0))
    assert abs(k["alpha"] - (-1j)) < 1e-14
    assert abs(k["F"] - math.pi**2 / 8) < 1e-14
    assert k["gamma_k"] == pytest.approx(0.5 + math.pi**2 / 8, rel=1e-14)


def test_initial_state_and_concurrence():
    rho = esdsim.initial_state("Phi", 0.5)
    assert rho.shape == (4, 4)
    assert abs(np.trace(rho) - 1) < 1e-15
    assert esdsim.concurrence_x(rho) == pytest.approx(1.0)
    assert esdsim.concurrence_general(rho) == pytest.approx(1.0)
    assert esdsim.concurrence_general(np.eye(4) / 4) == 0.0


def test_werner_state():
    bell = esdsim.initial_state("Phi", 0.5)
    for p in np.linspace(0, 1, 11):
        w = p * bell + (1 - p) * np.eye(4) / 4
        assert abs(esdsim.concurrence_general(w) - max(0.0, (3 * p - 1) / 2)) < 1e-10


def test_run_engine_routes_agree():
    params = esdsim.SystemParams.from_detuning(1.5, 0.0)
    gt = list(np.arange(0, 10.0001, 0.1))
    a = esdsim.run_engine("tcl_algebraic", "Phi", 0.3, gt, params)
    d = esdsim.run_engine("tcl_direct", "Phi", 0.3, gt, params)
    assert a["route"] == "riccati"
    assert np.max(np.abs(np.array(a["concurrence"]) - np.array(d["concurrence"]))) < 1e-6
    assert a["concurrence"][0] == pytest.approx(2 * math.sqrt(0.3 * 0.7), abs=1e-12)


def test_jc_closed_form():
    params = esdsim.SystemParams.from_detuning(30.0, 0.0)
    t = np.linspace(0, math.pi, 51)
    c = np.array(esdsim.jc_concurrence("Phi", 0.5, list(t), params))
    assert np.max(np.abs(c - np.cos(t) ** 2)) < 1e-10


def test_run_scenario_cardinality_and_summary():
    out = esdsim.run_scenario({"engine": "jc_rwa", "beta_sq": [0.2, 0.5, 0.8], "gt_max": 1.0, "gt_step": 0.01})
    assert len(out["concurrence"]) == 303
    assert len(out["summary"]["series"]) == 3
    assert out["summary"]["error_count"] == 0


def test_validation_errors():
    with pytest.raises(esdsim.ValidationError, match="beta_sq"):
        esdsim.run_scenario({"beta_sq": "0.5,1.5"})
    with pytest.raises(esdsim.ValidationError, match="Fig9"):
        esdsim.figure_scenario("Fig9")
    with pytest.raises(esdsim.ValidationError):
        esdsim.SystemParams(-1.0, 1.0, 1.0)
    assert issubclass(esdsim.ValidationError, esdsim.EsdError)


def test_figure_table():
    ids = esdsim.figure_ids()
    assert len(ids) == 10
    fig5 = esdsim.figure_scenario("Fig5")
    assert fig5["delta"] == pytest.approx(0.1 * fig5["omega0"])
    fig4a = esdsim.figure_scenario("Fig4a")
    assert fig4a["omega0"] == 2.0 and fig4a["alternate_omega0"] == 1.5


def test_cross_validation_passes():
    checks = esdsim.cross_validation()
    assert checks and all(c["passed"] for c in checks)


@pytest.mark.skipif("ESD_CLI" not in os.environ, reason="command-line tool not built")
def test_cli_exit_codes(tmp_path):
    cli = os.environ["ESD_CLI"]
    out = tmp_path / "run.csv"
    ok = subprocess.run([cli, "run", "--engine", "jc_rwa", "--gt-max", "1", "--gt-step", "0.5", "--out", str(out)],
                        capture_output=True, text=True)
    assert ok.returncode == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "engine,state,beta_sq,gt,concurrence,trace_residual,positivity_residual"
    assert len(lines) == 4

    cfg = tmp_path / "scenario.cfg"
    cfg.write_text("# file values, overridden by flags\nengine = jc_rwa\nbeta_sq = 0.2\ngt = 0:1:0.5\n")
    over = subprocess.run([cli, "run", str(cfg), "--beta-sq", "0.5"], capture_output=True, text=True)
    assert over.returncode == 0
    assert over.stdout.splitlines()[1].startswith("jc_rwa,Phi,0.5,0,")

    bad = subprocess.run([cli, "run", "--omega0", "abc"], capture_output=True, text=True)
    assert bad.returncode == 1 and "omega0" in bad.stderr
    unknown = subprocess.run([cli, "figure", "Fig9"], capture_output=True, text=True)
    assert unknown.returncode == 1 and "Fig1" in unknown.stderr
    usage = subprocess.run([cli, "run", "--no-such-flag"], capture_output=True, text=True)
    assert usage.returncode == 1
