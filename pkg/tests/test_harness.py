import csv
from dataclasses import replace
from fractions import Fraction as F

import pytest

from dampwave.config import ExperimentConfig, parse_config
from dampwave.energetics import CSV_COLUMNS
from dampwave.errors import ValidationError
from dampwave.model import Zero
from dampwave.solver import RunConfig
from dampwave.harness import atlas_rows, run_experiment, simulate, sweep
from dampwave.theory import classify

FAST = ExperimentConfig(cells=257, T_final=8.0, record_every=4)


def test_zero_data_all_zero(tmp_path):
    cfg = replace(FAST, u0=Zero(), u1=Zero())
    run_experiment(cfg, tmp_path)
    rows = list(csv.reader((tmp_path / "energies.csv").read_text().splitlines()))
    assert tuple(rows[0]) == CSV_COLUMNS
    for row in rows[1:]:
        assert all(float(x) == 0.0 for x in row[1:])


def test_outputs_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run_experiment(FAST, a)
    run_experiment(FAST, b)
    for name in ("energies.csv", "fit_report.txt", "prediction.txt", "config.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    assert b"\r" not in (a / "energies.csv").read_bytes()


def test_record_count_and_format(tmp_path):
    res = run_experiment(FAST, tmp_path)
    steps, _ = RunConfig(FAST.T_final, FAST.cfl).steps(FAST.grid())
    assert len(res.records) == steps // FAST.record_every + 1
    line = (tmp_path / "energies.csv").read_text().splitlines()[2]
    assert len(line.split(",")) == len(CSV_COLUMNS)


def test_config_file_round_trips(tmp_path):
    run_experiment(FAST, tmp_path)
    assert parse_config((tmp_path / "config.txt").read_text()) == FAST


def test_psi_family_runs():
    cfg = replace(FAST, n=3, alpha=F(1, 2), p=F(2), family="psi")
    res = simulate(cfg)
    assert all(r.estar_slack >= -1e-10 for r in res.records)


def test_one_cell_sweep_matches_run(tmp_path):
    cfg = replace(FAST, sweep_p=(F(3),), sweep_lambda=(F(0),), sweep_simulate=True)
    rows = sweep(cfg, tmp_path)
    res = simulate(cfg)
    pred = classify(cfg.theory_tuple())
    assert len(rows) == 1
    row = rows[0]
    assert row["region"] == pred.region.value
    assert float(row["mu_pred"]) == float(pred.mu)
    assert float(row["slope_fit"]) == res.fits["tE_plus_aL2"].slope
    assert row["verdict"] == res.fits["tE_plus_aL2"].verdict.value


FIG_POINTS = {
    (F(6, 5), F(1)): "II_Branch1",
    (F(6, 5), F(12)): "II_Branch6",
    (F(7, 5), F(5)): "II_Branch3",
    (F(7, 5), F(8)): "II_Branch5",
    (F(8, 5), F(4)): "II_Branch4",
    (F(11, 5), F(4)): "Saturated",
}


def _coarse_cfg():
    ps = (F(6, 5), F(7, 5), F(8, 5), F(11, 5))
    lams = (F(1), F(4), F(8), F(12))
    return ExperimentConfig(n=3, alpha=F(1, 2), p=F(2), sweep_p=ps, sweep_lambda=lams)


def test_coarse_sweep_regions(tmp_path):
    rows = sweep(_coarse_cfg(), tmp_path, threads=4)
    assert len(rows) == 16
    got = {(F(r["p"]), F(r["lambda"])): r["region"] for r in rows}
    for point, region in FIG_POINTS.items():
        if point in got:
            assert got[point] == region
    assert got[F(6, 5), F(12)] == "II_Branch6"
    assert got[F(7, 5), F(8)] == "II_Branch5"


def test_sweep_thread_determinism(tmp_path):
    cfg = _coarse_cfg()
    sweep(cfg, tmp_path / "one", threads=1)
    sweep(cfg, tmp_path / "four", threads=4)
    assert (tmp_path / "one" / "summary.csv").read_bytes() == (tmp_path / "four" / "summary.csv").read_bytes()


def test_sweep_records_cell_errors(tmp_path):
    cfg = replace(FAST, sweep_p=(F(3),), sweep_lambda=(F(0), F(1)), sweep_simulate=True, T_final=200.0, check_cone=True, r_max=20.0)
    rows = sweep(cfg, tmp_path)
    assert all("ConfigError" in r["error"] for r in rows)


def test_atlas_rows_sorted():
    rows = atlas_rows(3, F(1, 2), [F(2), F(6, 5)], [F(1), F(0)])
    assert [(r[0], r[1]) for r in rows] == [("1.2", "0"), ("1.2", "1"), ("2", "0"), ("2", "1")]


def test_invalid_config_never_reaches_disk(tmp_path):
    with pytest.raises(ValidationError):
        run_experiment(replace(FAST, cells=4), tmp_path / "x")
    assert not (tmp_path / "x" / "energies.csv").exists()
