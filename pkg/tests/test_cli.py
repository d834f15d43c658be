import json
import subprocess
import sys

import numpy as np
import pytest

from clonebound.cli import main
from clonebound.cloning import lower_bound
from clonebound.states import DensityMatrix, random_density

import oracles


def _states_file(tmp_path, seed1=31, seed2=32, name="states.json"):
    r1 = random_density(2, 2, seed=seed1)
    r2 = random_density(2, 2, seed=seed2)
    path = tmp_path / name
    path.write_text(json.dumps({"rho1": r1.to_dict(), "rho2": r2.to_dict()}))
    return path, r1, r2


def test_bound_prints_17_digit_value(capsys):
    assert main(["bound", "--f", "0.6", "--phi", "1", "--n", "1", "--l", "2"]) == 0
    out = capsys.readouterr().out
    assert out == format(lower_bound(0.6, 1.0, 1, 2), ".17g") + "\n"
    assert abs(float(out) - 0.29130254674348405) < 1e-12


def test_bound_zero_below_threshold(capsys):
    assert main(["bound", "--f", "0.6", "--phi", "0.6"]) == 0
    assert float(capsys.readouterr().out) == 0.0


def test_bound_exit_codes(capsys):
    assert main(["bound", "--f", "1", "--phi", "1"]) == 1  # degenerate pair
    assert main(["bound", "--f", "1.2", "--phi", "1"]) == 2  # out of range
    assert main(["bound", "--f", "0.5"]) == 2  # missing required flag
    err = capsys.readouterr().err
    assert "error" in err.lower()


def test_unknown_command_exits_2(capsys):
    assert main(["frobnicate"]) == 2
    assert main([]) == 2
    capsys.readouterr()


def test_verify_json_report(tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["verify", "--dim", "2", "--trials", "40", "--seed", "7",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["violations"] == 0
    assert doc["d"] == 2 and doc["seed"] == 7
    assert len(doc["checks"]) == 4
    assert capsys.readouterr().out == ""  # report went to the file


def test_verify_stdout_and_csv(capsys):
    assert main(["verify", "--dim", "2", "--trials", "25", "--format", "csv"]) == 0
    out = capsys.readouterr().out
    lines = out.strip().split("\n")
    assert lines[0] == "d,seed,slack,inequality,trials,violations,max_margin"
    assert len(lines) == 5


def test_verify_reports_are_byte_identical(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    main(["verify", "--dim", "3", "--trials", "30", "--seed", "5", "--out", str(a)])
    main(["verify", "--dim", "3", "--trials", "30", "--seed", "5", "--out", str(b)])
    assert a.read_bytes() == b.read_bytes()


def test_verify_rejects_bad_dim(capsys):
    assert main(["verify", "--dim", "1", "--trials", "5"]) == 2
    capsys.readouterr()


def test_purify_writes_verified_pair(tmp_path, capsys):
    states, r1, r2 = _states_file(tmp_path)
    out = tmp_path / "pur.json"
    assert main(["purify", "--states", str(states), "--phi", "0.4",
                 "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert abs(doc["achieved_overlap"] - 0.4) <= 1e-9
    assert max(doc["marginal_residuals"]) <= 1e-9
    y1 = np.array([complex(re, im) for re, im in doc["y1"]["amp"]])
    y2 = np.array([complex(re, im) for re, im in doc["y2"]["amp"]])
    assert abs(abs(np.vdot(y1, y2)) - 0.4) <= 1e-9
    capsys.readouterr()


def test_purify_unreachable_overlap_exits_1(tmp_path, capsys):
    states, _, _ = _states_file(tmp_path)
    assert main(["purify", "--states", str(states), "--phi", "0.9999"]) == 1
    capsys.readouterr()


def test_purify_bad_input_exits_2(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{ not json")
    assert main(["purify", "--states", str(bad), "--phi", "0.5"]) == 2
    missing = tmp_path / "missing.json"
    missing.write_text(json.dumps({"rho1": random_density(2, 1, seed=1).to_dict()}))
    assert main(["purify", "--states", str(missing), "--phi", "0.5"]) == 2
    assert main(["purify", "--states", str(tmp_path / "nope.json"),
                 "--phi", "0.5"]) == 2
    capsys.readouterr()


def test_optimize_restricted_run(tmp_path, capsys):
    states, r1, r2 = _states_file(tmp_path)
    cfg = tmp_path / "opt.json"
    cfg.write_text(json.dumps({"rho1": r1.to_dict(), "rho2": r2.to_dict(),
                               "restricted": True, "iterations": 50,
                               "restarts": 2}))
    out = tmp_path / "res.json"
    assert main(["optimize", "--config", str(cfg), "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["best_r"] >= doc["bound"] - 1e-8
    assert doc["config"]["iterations"] == 50
    assert doc["config"]["seed"] == 0  # documented default
    capsys.readouterr()


def test_optimize_flags_override_config(tmp_path, capsys):
    _, r1, r2 = _states_file(tmp_path)
    cfg = tmp_path / "opt.json"
    cfg.write_text(json.dumps({"rho1": r1.to_dict(), "rho2": r2.to_dict(),
                               "restricted": True, "iterations": 40,
                               "restarts": 1, "seed": 3}))
    out1 = tmp_path / "r1.json"
    out2 = tmp_path / "r2.json"
    main(["optimize", "--config", str(cfg), "--out", str(out1)])
    main(["optimize", "--config", str(cfg), "--seed", "3", "--out", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()  # same effective seed
    doc = json.loads(out1.read_text())
    assert doc["config"]["seed"] == 3


def test_optimize_csv_summary(tmp_path, capsys):
    _, r1, r2 = _states_file(tmp_path)
    cfg = tmp_path / "opt.json"
    cfg.write_text(json.dumps({"rho1": r1.to_dict(), "rho2": r2.to_dict(),
                               "restricted": True, "iterations": 30,
                               "restarts": 1}))
    assert main(["optimize", "--config", str(cfg), "--format", "csv"]) == 0
    out = capsys.readouterr().out
    lines = out.strip().split("\n")
    assert lines[0].startswith("best_r,bound,gap")
    assert len(lines) == 2
    assert float(lines[1].split(",")[0]) >= float(lines[1].split(",")[1]) - 1e-8


def test_optimize_full_search_with_defaults(tmp_path, capsys):
    _, r1, r2 = _states_file(tmp_path, seed1=41, seed2=42)
    cfg = tmp_path / "opt.json"
    cfg.write_text(json.dumps({"rho1": r1.to_dict(), "rho2": r2.to_dict(),
                               "iterations": 20, "restarts": 1, "env": 2}))
    assert main(["optimize", "--config", str(cfg)]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["env_dim"] == 2
    assert doc["n_in"] == 1 and doc["n_out"] == 2
    assert doc["phi"] == 1.0  # default blank ancilla pair is identical


def test_optimize_malformed_config_exits_2(tmp_path, capsys):
    cfg = tmp_path / "bad.json"
    cfg.write_text("[1, 2, 3]")
    assert main(["optimize", "--config", str(cfg)]) == 2
    capsys.readouterr()


def test_sweep_default_csv(capsys):
    assert main(["sweep", "--f-min", "0.1", "--f-max", "0.9", "--points", "9"]) == 0
    out = capsys.readouterr().out
    lines = out.strip().split("\n")
    assert lines[0] == "f,phi,n_in,n_out,bound"
    assert len(lines) == 10
    bounds = [float(l.split(",")[4]) for l in lines[1:]]
    assert all(b >= 0 for b in bounds)


def test_sweep_json_and_config(tmp_path, capsys):
    cfg = tmp_path / "sweep.json"
    cfg.write_text(json.dumps({"f_min": 0.2, "f_max": 0.4, "points": 3,
                               "phi": 0.9}))
    assert main(["sweep", "--config", str(cfg), "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert [r["f"] for r in doc] == [0.2, 0.30000000000000004, 0.4]
    assert all(r["phi"] == 0.9 for r in doc)


def test_sweep_bad_points_exits_2(capsys):
    assert main(["sweep", "--points", "0"]) == 2
    assert main(["sweep", "--f-max", "1.0"]) == 2  # grid must stay below 1
    capsys.readouterr()


def test_console_script_installed():
    proc = subprocess.run([sys.executable, "-m", "clonebound.cli", "bound",
                           "--f", "0.5", "--phi", "1"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert abs(float(proc.stdout) - lower_bound(0.5, 1.0, 1, 2)) < 1e-15
    assert proc.stderr == ""
