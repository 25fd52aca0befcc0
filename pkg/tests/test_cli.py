import json
import math
import subprocess
import sys

import numpy as np
import pytest

from gabortraj import (HermiteExpansion, cg_reconstruct, critical_radius, delta_criterion,
                       gram_frame_bounds, make_circles, sample_field)
from gabortraj.cli import main, run


def test_trajectory_gen(tmp_path):
    code, out = run(["trajectory", "gen", "--family", "circles", "--eta", "1", "--kmax", "5",
                     "--out", str(tmp_path)])
    assert code == 0
    assert out["length"] == pytest.approx(30 * math.pi)
    assert (tmp_path / "trajectory.json").exists()


def test_quadrature_artifact(tmp_path):
    run(["trajectory", "gen", "--family", "circles", "--eta", "1", "--kmax", "2", "--h", "0.1",
         "--out", str(tmp_path)])
    assert (tmp_path / "quadrature.csv").read_text().startswith("x,xi,weight\n")


def test_suzhou_matches_library():
    code, out = run(["frame", "suzhou", "--window", "h0", "--R", "0.5"])
    assert code == 0
    assert out["delta"] == delta_criterion(HermiteExpansion.basis(0), 0.5).delta
    assert out["critical_R"] == critical_radius(HermiteExpansion.basis(0))


def test_gram_matches_library():
    code, out = run(["frame", "gram", "--window", "h0", "--eta", "0.5", "--kmax", "16",
                     "--h", "0.02", "--N", "8"])
    rep = gram_frame_bounds("h0", make_circles(0.5, 16).quadrature(0.02), 8)
    assert code == 0 and out["A_N"] == rep.A_N and out["B_N"] == rep.B_N


def test_cg_matches_library():
    code, out = run(["reconstruct", "cg", "--seed", "1"])
    f = HermiteExpansion.random(8, 1)
    res = cg_reconstruct(sample_field(f, "h0", make_circles(0.5, 16).quadrature(0.02)), N=8,
                         truth=f)
    assert code == 0 and out["rel_error"] == res.rel_error


def test_cauchy_command():
    code, out = run(["reconstruct", "cauchy", "--window", "h0+h1", "--radii", "4,5",
                     "--seed", "7"])
    assert code == 0 and out["max_error"] <= 1e-6


def test_seed_mandatory():
    code, out = run(["reconstruct", "cauchy"])
    assert code == 2 and "seed" in out["error"]


def test_ill_posed_exit_code():
    code, out = run(["reconstruct", "cg", "--seed", "1", "--eta", "4", "--kmax", "2"])
    assert code == 3 and out["A_N"] < 1e-8


def test_precondition_exit_code():
    code, out = run(["trajectory", "gen", "--family", "polygons", "--vertices=-1,0;1,0;1,1;-1,1",
                     "--eta", "1", "--kmax", "1"])
    assert code == 4 and "edge 0" in out["error"]


def test_config_file(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("command: trajectory gen\nfamily: circles\neta: 2\nkmax: 3\n")
    code, out = run(["trajectory", "gen", "--config", str(cfg)])
    assert out["length"] == pytest.approx(2 * math.pi * 2 * 6)
    # flags override the file
    code, out = run(["trajectory", "gen", "--config", str(cfg), "--kmax", "1"])
    assert out["length"] == pytest.approx(4 * math.pi)


def test_config_unknown_key(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("family: circles\ncolour: red\n")
    code, out = run(["trajectory", "gen", "--config", str(cfg)])
    assert code == 2 and "colour" in out["error"]


def test_config_wrong_command(tmp_path):
    cfg = tmp_path / "c.yaml"
    cfg.write_text("command: density\n")
    assert run(["trajectory", "gen", "--config", str(cfg)])[0] == 2


def test_uniqueness_command():
    code, out = run(["uniqueness", "lines", "--window", "h1", "--theta", "0", "--offsets", "0"])
    assert code == 0 and out["unique"] is False and out["witness"] == 0.0


def test_weaklimit_artifacts(tmp_path):
    code, out = run(["weaklimit", "--family", "circles", "--eta", "1", "--kmax", "40",
                     "--sequence", "escape", "--seq-theta", "0", "--speed", "1",
                     "--ks", "4,8,16", "--h", "0.01", "--out", str(tmp_path), "--format", "csv"])
    assert code == 0 and out["predicted"] == "lines"
    assert sorted(p.name for p in tmp_path.iterdir()) == ["discrepancy.csv"]


def test_main_prints_one_line(capsys):
    assert main(["frame", "lines", "--window", "h0", "--theta", "0", "--eta", "0.1"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 1
    d = json.loads(lines[0])
    assert d["status"] == "ok" and 9.9 < d["A"] <= d["B"] < 10.1


def test_deterministic_artifacts(tmp_path):
    args = ["reconstruct", "cg", "--seed", "3", "--N", "4"]
    run(args + ["--out", str(tmp_path / "a")])
    run(args + ["--out", str(tmp_path / "b")])
    for name in ("reconstruction.json", "samples.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_thread_env(monkeypatch):
    monkeypatch.setenv("GABORTRAJ_THREADS", "1")
    assert run(["frame", "suzhou", "--R", "0.3"])[0] == 0


def test_console_script():
    proc = subprocess.run([sys.executable, "-m", "gabortraj.cli", "frame", "suzhou", "--R", "0.5"],
                          capture_output=True, text=True, check=True)
    assert json.loads(proc.stdout)["satisfied"] is True
