import dataclasses
import json

import pytest

from cogci import cli, harness
from cogci.cli import main
from cogci.harness import read_csv, sidecar_path
from cogci.scenario import ScenarioConfig, dump_config


@pytest.fixture
def config_file(tmp_path):
    def make(config=None, **extras):
        path = tmp_path / "cfg.toml"
        path.write_text(dump_config(config or ScenarioConfig(), extras))
        return path

    return make


def test_sweep_writes_csv_and_sidecar(config_file, tmp_path, capsys):
    cfg = config_file(sweep_variable="interference_limit", sweep_points=[0.1, 1.0],
                      trials_per_point=3, schemes=["ccipm"])
    out = tmp_path / "out.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(out), "--seed", "5"]) == 0
    rows = read_csv(out)
    assert len(rows) == 2 and all(r["seed"] == 5 for r in rows)
    assert sidecar_path(out).exists()
    assert "wrote 2 rows" in capsys.readouterr().out


def test_sweep_overrides(config_file, tmp_path):
    cfg = config_file(sweep_variable="channel_strength_db", sweep_points=[0.0], trials_per_point=100)
    out = tmp_path / "out.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(out), "--trials", "2",
                 "--schemes", "ccipm_strict,ccizf_standin"]) == 0
    rows = read_csv(out)
    assert {r["scheme"] for r in rows} == {"ccipm_strict", "ccizf_standin"}
    assert all(r["trials"] + r["degenerate"] == 2 for r in rows)


def test_sweep_fails_when_a_point_has_no_feasible_trial(config_file, tmp_path, monkeypatch, capsys):
    real = harness.run_sweep

    def all_failed_at_one_point(spec, workers=1):
        rows = tuple(r if r.sweep_point != 1.0 else
                     harness.SweepRow(r.sweep_point, r.scheme, r.metrics, 0, r.trials + r.degenerate)
                     for r in real(spec, workers).rows)
        return dataclasses.replace(real(spec, workers), rows=rows)

    monkeypatch.setattr(cli, "run_sweep", all_failed_at_one_point)
    cfg = config_file(sweep_variable="interference_limit", sweep_points=[0.1, 1.0],
                      trials_per_point=2, schemes=["ccipm"])
    out = tmp_path / "o.csv"
    assert main(["sweep", "--config", str(cfg), "--out", str(out)]) == 1
    assert "[1.0]" in capsys.readouterr().err
    assert out.exists()


def test_sweep_io_failure(config_file, tmp_path):
    cfg = config_file(sweep_points=[0.0], trials_per_point=1, schemes=["ccipm"])
    assert main(["sweep", "--config", str(cfg), "--out", str(tmp_path / "no" / "x.csv")]) == 2
    assert main(["sweep", "--config", str(tmp_path / "missing.toml"), "--out", "x.csv"]) == 2


@pytest.mark.parametrize("scheme", ["ccipm", "ccipm_strict", "ccizf_standin", "multicast_bound"])
def test_solve_one(config_file, capsys, scheme):
    cfg = config_file(ScenarioConfig(interference_limit=0.5))
    assert main(["solve-one", "--config", str(cfg), "--symbols", "1,3", "--scheme", scheme]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["status"] == "Optimal"
    if "audit" in report:
        assert report["audit"]["passed"]


def test_solve_one_rejects_wrong_symbol_count(config_file):
    assert main(["solve-one", "--config", str(config_file()), "--symbols", "1"]) == 2
    assert main(["solve-one", "--config", str(config_file()), "--symbols", "1,9"]) == 2


def test_selftest_quick(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.count("[PASS]") >= 10
