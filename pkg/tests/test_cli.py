import json
import subprocess
import sys
from importlib import resources

import numpy as np
import pytest

from jetph.cli import main
from jetph.fdm.output import read_csv, read_snapshots

from test_models_checks import tampered_mindlin


def bundled(name):
    return json.loads(resources.files("jetph").joinpath("configs").joinpath(f"{name}.json").read_text())


def small_config(tmp_path, **kw):
    d = {
        "plate": "test_plate",
        "grid": {"nx": 8, "ny": 8},
        "dt": 0.02,
        "steps": 10,
        "formulation": "geometric",
        "initial": {"kind": "gaussian", "amplitude": 1.0, "width": 0.15},
    }
    d.update(kw)
    path = tmp_path / "sim.json"
    path.write_text(json.dumps(d))
    return str(path)


def test_derive_lagrangian_text(capsys):
    assert main(["derive", "mindlin"]) == 0
    out = capsys.readouterr().out
    for dep in ("w", "psi", "phi"):
        assert f"  {dep}: " in out
    assert "-h*rho*w_tt" in out


def test_derive_json_and_out(tmp_path, capsys):
    assert main(["derive", "mindlin", "--form", "dirac", "--format", "json", "--out", str(tmp_path)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["operator"]) == 8 and all(len(r) == 8 for r in doc["operator"])
    assert set(doc["operator"][0][1]) == {"c0", "cX", "cY"}
    assert doc["operator"][0][1]["cX"] == "1"
    assert len(doc["compatibility"]) == 5
    assert json.loads((tmp_path / "dirac.json").read_text()) == doc
    assert "J_SD" in (tmp_path / "dirac.txt").read_text()


def test_derive_geometric(capsys):
    assert main(["derive", "wave1d", "--form", "geometric", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["state"] == ["w", "p_w"]
    assert doc["J"] == [["0", "1"], ["-1", "0"]]
    assert set(doc["power"]) == {"X"}


def test_derive_bad_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{oops")
    assert main(["derive", str(bad)]) == 2
    assert "error" in capsys.readouterr().err
    assert main(["derive", str(tmp_path / "missing.json")]) == 2


@pytest.mark.parametrize("name", ["mindlin", "wave1d"])
def test_check_presets(name, capsys):
    assert main(["check", name]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("PASS") >= 10


def test_check_tampered(tmp_path, capsys):
    path = tmp_path / "tampered.json"
    path.write_text(json.dumps(tampered_mindlin()))
    assert main(["check", str(path)]) == 1
    out = capsys.readouterr().out
    assert "FAIL resultant M_x = -dL/dpsi_X: difference" in out
    assert "nu2" in out


def test_usage_errors():
    assert main([]) == 2
    assert main(["derive", "mindlin", "--form", "hamiltonian"]) == 2
    assert main(["simulate", "clamped_demo", "--grid", "8x8"]) == 2
    assert main(["simulate", "clamped_demo", "--bc", "x0"]) == 2
    assert main(["simulate", "no_such_config"]) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "jetph.cli", "frobnicate"], capture_output=True, text=True)
    assert proc.returncode == 2
    proc = subprocess.run([sys.executable, "-m", "jetph.cli", "--help"], capture_output=True, text=True)
    assert proc.returncode == 0 and "derive" in proc.stdout


def test_simulate_zero_steps(tmp_path):
    cfg = small_config(tmp_path, steps=0)
    assert main(["simulate", cfg, "--out", str(tmp_path / "o")]) == 0
    cols = read_csv(tmp_path / "o" / "timeseries.csv")
    assert list(cols) == ["t", "H", "P_boundary", "balance_residual"]
    assert len(cols["t"]) == 1


def test_simulate_overrides_and_snapshots(tmp_path):
    cfg = small_config(tmp_path)
    args = ["simulate", cfg, "--grid", "6,10", "--steps", "4", "--dt", "0.01", "--bc", "x0=free",
            "--formulation", "dirac", "--snapshot-every", "2", "--out", str(tmp_path / "o")]
    assert main(args) == 0
    run_cfg = json.loads((tmp_path / "o" / "run_config.json").read_text())
    assert run_cfg["grid"] == {"nx": 6, "ny": 10} and run_cfg["bc"]["x0"] == {"type": "free"}
    times, data = read_snapshots(tmp_path / "o" / "snapshots_dirac.bin")
    assert np.allclose(times, [0, 0.02, 0.04]) and data.shape == (3, 6, 7, 11)


def test_simulate_formats(tmp_path, capsys):
    cfg = small_config(tmp_path)
    assert main(["simulate", cfg, "--out", str(tmp_path / "o"), "--format", "json"]) == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["steps"] == 10 and "geometric" in summary["forms"]
    assert main(["simulate", cfg, "--out", str(tmp_path / "o"), "--format", "csv"]) == 0
    assert capsys.readouterr().out.startswith("t,H,P_boundary,balance_residual\n")


def test_stability_exit_codes(tmp_path):
    cfg = small_config(tmp_path, dt=1.0, steps=1)
    assert main(["simulate", cfg, "--out", str(tmp_path / "o")]) == 1
    with pytest.warns(RuntimeWarning):
        assert main(["simulate", cfg, "--out", str(tmp_path / "o"), "--force"]) == 0


def test_tolerance_exceeded(tmp_path):
    cfg = small_config(tmp_path, tolerance={"balance_residual": 1e-30})
    assert main(["simulate", cfg, "--out", str(tmp_path / "o")]) == 1


def test_output_reproducible(tmp_path):
    cfg = small_config(tmp_path, formulation="both")
    for d in ("a", "b"):
        assert main(["compare", cfg, "--out", str(tmp_path / d)]) == 0
    assert (tmp_path / "a" / "compare.csv").read_bytes() == (tmp_path / "b" / "compare.csv").read_bytes()


def test_clamped_demo_within_tolerance(tmp_path):
    assert main(["simulate", "clamped_demo", "--out", str(tmp_path)]) == 0
    cols = read_csv(tmp_path / "timeseries.csv")
    tol = bundled("clamped_demo")["tolerance"]["balance_residual"]
    assert np.nanmax(np.abs(cols["balance_residual"])) < tol


def test_compare_demo_pair_converges(tmp_path):
    maxima = []
    for name in ("compare_coarse", "compare_fine"):
        assert main(["compare", name, "--out", str(tmp_path / name)]) == 0
        cols = read_csv(tmp_path / name / "compare.csv")
        assert "discrepancy" in cols and "H_dirac" in cols and "H_geometric" in cols
        maxima.append(cols["discrepancy"].max())
    assert 3.5 <= maxima[0] / maxima[1] <= 4.5
