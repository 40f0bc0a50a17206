import json

import numpy as np
import pytest

from meantest.cli import main
from meantest.io import DataFormat, write_samples


@pytest.fixture
def zeros_csv(tmp_path):
    path = tmp_path / "zeros.csv"
    write_samples(path, np.zeros((100, 4)), DataFormat.CSV_ROWS)
    return path


@pytest.fixture
def point_mass_spec(tmp_path):
    path = tmp_path / "pm.json"
    path.write_text(json.dumps({"family": "gaussian", "dim": 2, "mean": [3.0, 4.0], "cov_factor": 0.0}))
    return path


def make_plan_file(tmp_path, **overrides):
    plan = {
        "name": "cli-plan",
        "grid": [{"epsilon": 1.0, "dim": 2, "n": 5}],
        "null_spec": {"family": "gaussian", "dim": 2, "mean": [0.0, 0.0], "cov_factor": 0.0},
        "alt_specs": [],
        "trials": 4,
        "seed": 11,
    }
    plan.update(overrides)
    path = tmp_path / "plan.json"
    path.write_text(json.dumps(plan))
    return path


# --- test subcommand --------------------------------------------------------


def test_accept_exits_zero(zeros_csv, capsys):
    assert main(["test", str(zeros_csv), "--epsilon", "1"]) == 0
    out = capsys.readouterr().out
    assert "verdict: ACCEPT" in out
    assert "n (per half): 50" in out


def test_reject_exits_one(tmp_path, capsys):
    path = tmp_path / "pm.csv"
    write_samples(path, np.tile([3.0, 4.0], (2, 1)), "csv")
    assert main(["test", str(path), "--epsilon", "1"]) == 1
    out = capsys.readouterr().out
    assert "verdict: REJECT" in out
    assert "under-sampled" in out  # 2 rows is far below the rule's 2n


def test_json_report_carries_decision_fields(zeros_csv, capsys):
    assert main(["test", str(zeros_csv), "--epsilon", "1", "--json"]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["verdict"] == "ACCEPT"
    assert report["z"] == 0.0
    assert report["n"] == 50
    assert report["under_sampled"] is False
    assert report["dim"] == 4
    assert report["threshold"] > 0


def test_malformed_csv_exits_two(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\n3,x\n")
    assert main(["test", str(path), "--epsilon", "1"]) == 2
    assert "line 2, column 1" in capsys.readouterr().err


def test_nonfinite_csv_exits_two(tmp_path, capsys):
    path = tmp_path / "inf.csv"
    path.write_text("1,2\ninf,4\n")
    assert main(["test", str(path), "--epsilon", "1"]) == 2
    assert "row 1" in capsys.readouterr().err


def test_missing_file_exits_two(tmp_path, capsys):
    assert main(["test", str(tmp_path / "nope.csv"), "--epsilon", "1"]) == 2


def test_raw_input_requires_dim(tmp_path, capsys):
    path = tmp_path / "x.raw"
    write_samples(path, np.zeros((10, 2)), "raw")
    assert main(["test", str(path), "--format", "raw", "--epsilon", "1"]) == 2
    assert main(["test", str(path), "--format", "raw", "--dim", "2", "--epsilon", "1"]) == 0


def test_unknown_flag_exits_two(zeros_csv):
    with pytest.raises(SystemExit) as exc:
        main(["test", str(zeros_csv), "--epsilon", "1", "--frobnicate"])
    assert exc.value.code == 2


# --- generate subcommand ----------------------------------------------------


def test_generate_point_mass_rows(point_mass_spec, tmp_path, capsys):
    out = tmp_path / "pm.csv"
    assert main(["generate", str(point_mass_spec), "--count", "3", "--seed", "1", "--out", str(out)]) == 0
    rows = out.read_text().splitlines()
    assert rows == ["3,4"] * 3


def test_generate_then_test_composes(point_mass_spec, tmp_path):
    out = tmp_path / "pm.csv"
    main(["generate", str(point_mass_spec), "--count", "80", "--seed", "1", "--out", str(out)])
    assert main(["test", str(out), "--epsilon", "1"]) == 1  # ||mu|| = 5 >> eps


def test_generate_raw_round_trip_byte_identical(tmp_path):
    spec = tmp_path / "g.json"
    spec.write_text(json.dumps({"family": "gaussian", "dim": 3, "mean": [0.0, 0.0, 0.0]}))
    a, b = tmp_path / "a.raw", tmp_path / "b.raw"
    main(["generate", str(spec), "--count", "50", "--seed", "9", "--out", str(a), "--format", "raw"])
    main(["generate", str(spec), "--count", "50", "--seed", "9", "--out", str(b), "--format", "raw"])
    assert a.read_bytes() == b.read_bytes()


def test_generate_writes_manifest(point_mass_spec, tmp_path):
    out = tmp_path / "pm.csv"
    main(["generate", str(point_mass_spec), "--count", "2", "--seed", "5", "--out", str(out)])
    manifest = json.loads((tmp_path / "pm.csv.manifest.json").read_text())
    assert manifest["seed"] == {"value": 5, "trial_index": 0}
    assert manifest["tool_version"]
    assert manifest["started_at"] <= manifest["finished_at"]
    assert "generate" in manifest["command"]


def test_generate_invalid_spec_exits_two(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"family": "gaussian", "dim": 2, "mean": [1.0, 2.0, 3.0]}))
    out = tmp_path / "x.csv"
    assert main(["generate", str(bad), "--count", "2", "--seed", "0", "--out", str(out)]) == 2
    assert "mean" in capsys.readouterr().err


def test_env_seed_default(point_mass_spec, tmp_path, monkeypatch):
    # point mass output is seed-independent; check the recorded seed instead
    out = tmp_path / "e.csv"
    monkeypatch.setenv("MEANTEST_SEED", "1234")
    main(["generate", str(point_mass_spec), "--count", "1", "--out", str(out)])
    manifest = json.loads((tmp_path / "e.csv.manifest.json").read_text())
    assert manifest["seed"]["value"] == 1234
    monkeypatch.setenv("MEANTEST_SEED", "not-a-number")
    assert main(["generate", str(point_mass_spec), "--count", "1", "--out", str(out)]) == 2


# --- simulate subcommand ----------------------------------------------------


def test_simulate_point_mass_null(tmp_path, capsys):
    plan = make_plan_file(tmp_path, trials=1)
    out = tmp_path / "res.json"
    assert main(["simulate", str(plan), "--out", str(out), "--parallelism", "1"]) == 0
    result = json.loads(out.read_text())
    assert result["cells"][0]["accept_rate"] == 1.0
    assert result["completed_trials"] == 1
    assert (tmp_path / "res.json.manifest.json").exists()
    assert (tmp_path / "res.json.null.dat").exists()


def test_simulate_deterministic_payload(tmp_path):
    plan = make_plan_file(
        tmp_path,
        null_spec={"family": "gaussian", "dim": 2, "mean": [0.0, 0.0]},
        trials=25,
    )
    out1, out2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["simulate", str(plan), "--out", str(out1), "--parallelism", "1"]) == 0
    assert main(["simulate", str(plan), "--out", str(out2), "--parallelism", "2"]) == 0
    assert out1.read_bytes() == out2.read_bytes()
    assert (tmp_path / "r1.json.null.dat").read_bytes() == (tmp_path / "r2.json.null.dat").read_bytes()


def test_simulate_trials_and_seed_overrides(tmp_path):
    plan = make_plan_file(tmp_path)
    out = tmp_path / "r.json"
    assert main(["simulate", str(plan), "--out", str(out), "--trials", "7", "--seed", "99",
                 "--parallelism", "1"]) == 0
    result = json.loads(out.read_text())
    assert result["completed_trials"] == 7
    manifest = json.loads((tmp_path / "r.json.manifest.json").read_text())
    assert manifest["config"]["seed"]["value"] == 99
    assert manifest["config"]["trials"] == 7


def test_simulate_invalid_plan_exits_two(tmp_path, capsys):
    plan = make_plan_file(tmp_path, grid=[{"dim": 2}])
    out = tmp_path / "r.json"
    assert main(["simulate", str(plan), "--out", str(out)]) == 2
    assert "epsilon" in capsys.readouterr().err
