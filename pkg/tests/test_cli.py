import json
import math
import subprocess
import sys

import pytest
from scipy.special import beta

from rpkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    return code, json.loads(out)


@pytest.fixture
def params_file(tmp_path):
    def write(obj, name="params.json"):
        path = tmp_path / name
        path.write_text(json.dumps(obj))
        return str(path)

    return write


def test_nondim(capsys, params_file):
    src = params_file({"rho": 4, "mu": 1, "gamma": 0, "p_g0": 0, "r0": 1, "omega": 1, "p0_char": 4, "k": 1})
    code, out = run_json(capsys, "nondim", "--input", src)
    assert code == 0
    assert (out["re_inv"], out["we"], out["th"], out["p_n"]) == (1.0, 0.0, 1.0, 0.0)


def test_nondim_validation_error(capsys, params_file):
    src = params_file({"rho": -1, "mu": 1, "gamma": 0, "p_g0": 0, "r0": 1, "omega": 1, "p0_char": 4, "k": 1})
    code, _, err = run(capsys, "nondim", "--input", src)
    assert code == 2 and "error" in err


def test_painleve_default(capsys):
    code, out = run_json(capsys, "painleve")
    assert code == 0
    assert out["verdict"] == "FAIL"
    assert out["candidates"][0]["alpha"] == "-2/5"


def test_painleve_p1(capsys):
    code, out = run_json(capsys, "painleve", "--ode", "p1")
    assert code == 0 and out["verdict"] == "PASS"


def test_painleve_empty_expression(capsys):
    code, _, _ = run(capsys, "painleve", "--expr", "")
    assert code == 2


@pytest.mark.parametrize("case,basis", [
    ("1", [{"xi": "1", "eta": "0"}]),
    ("1.2", [{"xi": "1 + t", "eta": "2/5*R"}]),
    ("2", [{"xi": "1 + t", "eta": "1/2*R"}]),
    ("3", [{"xi": "1 + t", "eta": "2/3*R"}]),
    ("generic", []),
])
def test_symmetry_cases(capsys, case, basis):
    code, out = run_json(capsys, "symmetries", "--case", case)
    assert code == 0
    got = [{"xi": b["xi"].replace(" ", ""), "eta": b["eta"].replace(" ", "")} for b in out["basis"]]
    want = [{"xi": b["xi"].replace(" ", ""), "eta": b["eta"].replace(" ", "")} for b in basis]
    assert got == want
    assert out["max_residual"] < 1e-9


def test_symmetry_scan(capsys):
    code, out = run_json(capsys, "symmetries", "--case", "3", "--scan-exponent=-3..0", "--step", "1/3")
    assert code == 0 and out["selected"] == ["-2/3"]


def test_equilibrium(capsys, params_file):
    src = params_file({"re_inv": 0, "we": 1, "th": 1, "p_n": 2, "k": 1, "forcing": {"type": "constant", "p0": 1}})
    code, out = run_json(capsys, "--params", src, "equilibrium")
    assert code == 0 and out["R_eq"] == pytest.approx(1.0, rel=1e-14)


def test_collapse_time(capsys, params_file):
    src = params_file({"re_inv": 0, "we": 0, "th": 1, "p_n": 0, "k": 1, "forcing": {"type": "constant", "p0": 1}})
    code, out = run_json(capsys, "collapse-time", "--params", src)
    assert code == 0
    assert out["collapse_time"] == pytest.approx(math.sqrt(1.5) / 3 * beta(5 / 6, 0.5), abs=1e-10)


def test_rdot2(capsys, params_file):
    src = params_file({"re_inv": 0, "we": 0, "th": 1, "p_n": 0, "k": "4/3", "forcing": {"type": "constant", "p0": 1}})
    code, out = run_json(capsys, "rdot2", "--params", src, "--R", "0.5")
    assert code == 0
    assert out["rdot2"] == [pytest.approx(14 / 3, rel=1e-14)]


def test_reduce(capsys):
    code, out = run_json(capsys, "reduce")
    assert code == 0 and "dydx" in json.dumps(out)


def test_invariant_csv(capsys, tmp_path):
    code, _, _ = run(capsys, "invariant", "--case", "2", "--out", str(tmp_path))
    assert code == 0
    lines = (tmp_path / "invariant_case_2.csv").read_text().splitlines()
    assert lines[0] == "t,R,Rdot,Rddot,residual"
    assert max(abs(float(x.split(",")[-1])) for x in lines[1:]) < 1e-12
    manifest = json.loads((tmp_path / "manifest.json").read_text())
    assert manifest["command"] == "invariant" and manifest["outputs"]


def test_simulate_and_audit(capsys, tmp_path, params_file):
    csv = tmp_path / "run" / "traj.csv"
    code, out, _ = run(capsys, "simulate", "--r0", "1.5", "--t-end", "5", "--out", str(csv))
    assert code == 0
    stats = json.loads(out)
    assert stats["terminal_event"]["kind"] == "REACHED_T_END"
    assert csv.read_text().startswith("t,R,Rdot\n")
    assert json.loads(csv.with_suffix(".json").read_text()) == stats
    assert (csv.parent / "traj.manifest.json").exists()
    code, audit = run_json(capsys, "energy-audit", str(csv))
    assert code == 0
    assert audit["relative_defect"] < 1e-8


def test_simulate_collapse(capsys, params_file):
    src = params_file({"re_inv": 0, "we": 0, "th": 1, "p_n": 0, "k": 1, "forcing": {"type": "constant", "p0": 1}})
    code, out = run_json(capsys, "--json", "--params", src, "simulate", "--t-end", "2", "--r-floor", "1e-4")
    assert code == 0 and out["terminal_event"]["kind"] == "COLLAPSE"


def test_verify_all(capsys):
    code, out = run_json(capsys, "verify", "--all")
    assert code == 0 and out["ok"]


def test_verify_detects_corruption(capsys):
    code, out = run_json(capsys, "verify", "--all", "--perturb", "0.01")
    assert code == 1 and not out["ok"]


def test_bad_params_file(capsys, tmp_path):
    code, _, _ = run(capsys, "--params", str(tmp_path / "missing.json"), "equilibrium")
    assert code == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "rpkit", "painleve", "--ode", "p1"], capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["verdict"] == "PASS"
