import json
from dataclasses import replace

import pytest

from equivobs.cli import main
from equivobs.sim import ScenarioConfig


@pytest.fixture
def short_config(tmp_path, hovercraft_cfg):
    path = tmp_path / "short.json"
    path.write_text(json.dumps(replace(hovercraft_cfg, duration=0.2).to_dict()))
    return path


def test_run_writes_outputs(tmp_path, short_config, capsys):
    out = tmp_path / "run"
    assert main(["run", "--config", str(short_config), "--out", str(out), "--integrator", "exp"]) == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["records"] == 21
    summary = json.loads((out / "summary.json").read_text())
    assert summary["config"]["integrator"] == "exp"
    assert (out / "trajectory.svg").exists()


def test_verify_passes_and_mutant_fails(capsys):
    assert main(["verify", "--group", "so3", "--cases", "20", "--seed", "5"]) == 0
    assert "FAIL" not in capsys.readouterr().out
    assert main(["verify", "--group", "se2", "--cases", "20", "--mutate-input-action"]) == 1
    out = capsys.readouterr().out
    assert any(line.split()[:2] == ["FAIL", "equivariance"] for line in out.splitlines())


def test_sweep(tmp_path, short_config, capsys):
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", str(short_config), "--k1", "0.5,2", "--k2", "1",
                 "--out", str(out), "--jobs", "2", "--no-plots"]) == 0
    rows = json.loads((out / "sweep.json").read_text())
    assert sorted(r["k1"] for r in rows) == [0.5, 2.0]
    for r in rows:
        assert (out / r["digest"] / "trajectory.csv").exists()
        cfg = ScenarioConfig.from_dict(json.loads((out / r["digest"] / "summary.json").read_text())["config"])
        assert cfg.digest() == r["digest"]


def test_errors_exit_with_code_two(tmp_path, capsys):
    assert main(["run", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2
    assert main(["verify", "--group", "sl9", "--cases", "1"]) == 2
    assert "error:" in capsys.readouterr().err
