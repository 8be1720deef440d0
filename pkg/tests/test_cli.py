import subprocess
import sys

import pytest

from dampwave.cli import main

FAST = """[model]
n = 1
p = 3
[grid]
cells = 257
[run]
T_final = 8
record_every = 4
"""


@pytest.fixture
def cfg_path(tmp_path):
    path = tmp_path / "exp.cfg"
    path.write_text(FAST)
    return path


def test_simulate(cfg_path, tmp_path, capsys):
    assert main(["simulate", "--config", str(cfg_path), "--out", str(tmp_path / "o")]) == 0
    assert (tmp_path / "o" / "energies.csv").exists()
    assert "region = " in capsys.readouterr().out


def test_classify_reference_point(capsys):
    assert main(["classify", "--n", "3", "--alpha", "1/2", "--p", "7/5", "--lambda", "6"]) == 0
    out = capsys.readouterr().out
    assert "region = II_Branch5" in out and "mu = 5\n" in out and "log_power = 1" in out


def test_classify_invalid_exit_1(capsys):
    assert main(["classify", "--n", "3", "--p", "4"]) == 1
    assert "condition (p)" in capsys.readouterr().err


def test_atlas(tmp_path):
    assert main(["atlas", "--p-range", "6/5:2:3", "--lambda-range", "0:4:5", "--out", str(tmp_path)]) == 0
    assert len((tmp_path / "atlas.csv").read_text().splitlines()) == 16


def test_atlas_without_axes_exit_1(tmp_path):
    assert main(["atlas", "--out", str(tmp_path)]) == 1


def test_sweep(tmp_path):
    path = tmp_path / "s.cfg"
    path.write_text("[model]\nn = 3\nalpha = 1/2\np = 2\n[sweep]\np = 6/5, 2\nlambda = 0, 1\n")
    assert main(["sweep", "--config", str(path), "--out", str(tmp_path / "o"), "--threads", "2"]) == 0
    assert len((tmp_path / "o" / "summary.csv").read_text().splitlines()) == 5


def test_parse_error_exit_1(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("[model]\nn = 1\nn = 2\n")
    assert main(["simulate", "--config", str(path)]) == 1
    assert "line 3" in capsys.readouterr().err


def test_every_violation_listed(tmp_path, capsys):
    path = tmp_path / "bad.cfg"
    path.write_text("[model]\nn = 3\np = 4\n[weights]\nepsilon = 0.9\n")
    assert main(["simulate", "--config", str(path)]) == 1
    err = capsys.readouterr().err
    assert "condition (p)" in err and "epsilon" in err


def test_runtime_error_exit_2(tmp_path):
    assert main(["simulate", "--config", str(tmp_path / "missing.cfg")]) == 2


def test_verify_weights_and_selftest(tmp_path, capsys):
    path = tmp_path / "w.cfg"
    path.write_text("[model]\nn = 3\nalpha = 1/2\np = 2\n[grid]\nr_max = 60\ncells = 1024\n")
    assert main(["verify-weights", "--config", str(path)]) == 0
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "PASS" in out and "FAIL" not in out


def test_console_script_module():
    proc = subprocess.run([sys.executable, "-m", "dampwave.cli", "classify", "--p", "3"], capture_output=True, text=True)
    assert proc.returncode == 0 and "region = II_Branch1" in proc.stdout
