import json

import numpy as np
import pytest

from linssp.cli import OUTPUT_ENV, bundled_config, main
from linssp.instances import random_tabular
from linssp.model import save_instance, to_dict


def _write(tmp_path, cfg, name="cfg.json"):
    p = tmp_path / name
    p.write_text(json.dumps(cfg))
    return str(p)


def _small(tmp_path, **extra):
    cfg = {"instance": {"kind": "hard", "preset": "default", "d": 3, "B_star": 3.0},
           "agent": {"algorithm": "levis"}, "K_max": 60, "trials": 2, "parallelism": 1,
           "output": str(tmp_path / "out")}
    cfg.update(extra)
    return cfg


def test_bundled_config_dry_run(capsys):
    assert bundled_config().exists()
    assert main(["run", "--dry-run"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["agent"]["delta"] == 0.01 and out["resolved_rho"] == 0.0
    assert out["trials"] == 40 and out["K_max"] == 2000


def test_dry_run_resolves_cube_root(tmp_path, capsys):
    cfg = _small(tmp_path, agent={"algorithm": "levis", "rho": "k-cube-root"}, K_max=1000)
    assert main(["run", _write(tmp_path, cfg), "--dry-run"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["resolved_rho"] == pytest.approx(0.1)


def test_bad_delta_names_field(tmp_path, capsys):
    cfg = _small(tmp_path, agent={"algorithm": "levis", "delta": 1.5})
    assert main(["run", _write(tmp_path, cfg)]) == 1
    assert "delta" in capsys.readouterr().err


@pytest.mark.parametrize("patch,field", [({"trials": 0}, "trials"), ({"bogus": 1}, "bogus"),
                                         ({"instance": {"kind": "cube"}}, "instance")])
def test_other_config_errors(tmp_path, capsys, patch, field):
    assert main(["run", _write(tmp_path, _small(tmp_path, **patch))]) == 1
    assert field in capsys.readouterr().err


def test_missing_config_file(tmp_path):
    assert main(["run", str(tmp_path / "nope.json")]) == 1


def test_run_writes_reproducible_outputs(tmp_path, capsys):
    cfg = _small(tmp_path)
    path = _write(tmp_path, cfg)
    assert main(["run", path]) == 0
    out = tmp_path / "out"
    first = {n: (out / n).read_bytes() for n in ("trace.csv", "aggregate.csv", "summary.json")}
    summary = json.loads(first["summary.json"])
    assert summary["tainted_trials"] == 0
    assert summary["config"]["K_max"] == 60
    assert main(["run", path]) == 0
    for n, data in first.items():
        assert (out / n).read_bytes() == data


def test_env_var_sets_output(tmp_path, monkeypatch):
    cfg = _small(tmp_path)
    del cfg["output"]
    monkeypatch.setenv(OUTPUT_ENV, str(tmp_path / "envout"))
    assert main(["run", _write(tmp_path, cfg)]) == 0
    assert (tmp_path / "envout" / "summary.json").exists()


def test_flag_overrides(tmp_path):
    cfg = _small(tmp_path)
    assert main(["run", _write(tmp_path, cfg), "--trials", "1", "--output",
                 str(tmp_path / "o2"), "--seed", "4"]) == 0
    summary = json.loads((tmp_path / "o2" / "summary.json").read_text())
    assert summary["config"]["trials"] == 1 and summary["config"]["seed"] == 4


def test_truncation_exit_code(tmp_path):
    cfg = _small(tmp_path, step_cap=1, K_max=30)
    assert main(["run", _write(tmp_path, cfg)]) == 2


def test_validate_and_oracle_on_hard(tmp_path, capsys):
    path = str(tmp_path / "hard.json")
    assert main(["make-instance", path]) == 0
    assert main(["validate", path]) == 0
    capsys.readouterr()
    assert main(["oracle", path]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["V_star_init"] == pytest.approx(3.0, abs=1e-8)
    assert out["pi_star"][0] == 15


def test_validate_reports_corrupted_row(tmp_path, capsys):
    inst = random_tabular(np.random.default_rng(0), 3, 2)
    data = to_dict(inst)
    data["parameters"]["P"][0][1][0] += 0.1
    data["kind"] = "explicit"
    data["theta_star"] = np.array(data["parameters"]["P"]).ravel().tolist()
    data["features"] = inst.features.tolist()
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(data))
    assert main(["validate", str(path)]) == 1
    assert "row-sum at (0, 1)" in capsys.readouterr().out


def test_validate_tabular(tmp_path):
    path = tmp_path / "tab.json"
    save_instance(random_tabular(np.random.default_rng(2), 4, 2), path)
    assert main(["validate", str(path)]) == 0


def test_oracle_one_step_instance(tmp_path, capsys):
    P = np.zeros((2, 2, 2))
    P[:, :, 1] = 1.0
    data = {"kind": "tabular", "init": 0, "goal": 1, "cost": [[0.4, 0.25], [0.0, 0.0]],
            "parameters": {"P": P.tolist()}}
    path = tmp_path / "one.json"
    path.write_text(json.dumps(data))
    assert main(["oracle", str(path)]) == 0
    assert json.loads(capsys.readouterr().out)["V_star_init"] == pytest.approx(0.25)
