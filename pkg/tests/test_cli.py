import csv
import json
import math
import subprocess
import sys
from pathlib import Path

import pytest

from lipwalk.cli import SAMPLE_COLUMNS, STEP_COLUMNS, main

SCENARIOS = Path(__file__).parent.parent / "scenarios"


def read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_run_equilibrium(tmp_path):
    assert main(["run", str(SCENARIOS / "equilibrium.toml"), "-o", str(tmp_path)]) == 0
    rows = read_csv(tmp_path / "samples.csv")
    assert rows[0] == SAMPLE_COLUMNS
    assert all(float(r[2]) == 0.0 and float(r[3]) == 0.0 for r in rows[1:])
    steps = read_csv(tmp_path / "steps.csv")
    assert steps[0] == STEP_COLUMNS
    assert len(steps) == 6


def test_run_deadbeat_summary(tmp_path):
    assert main(["run", str(SCENARIOS / "deadbeat.toml"), "-o", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["max_step_L_rel_error"] <= 1e-9
    assert summary["n_steps"] == 20


def test_csv_floats_round_trip(tmp_path):
    main(["run", str(SCENARIOS / "deadbeat.toml"), "-o", str(tmp_path)])
    rows = read_csv(tmp_path / "steps.csv")[1:]
    for row in rows:
        for cell in row[1:]:
            assert repr(float(cell)) == cell


def test_output_dir_from_environment(tmp_path, monkeypatch):
    monkeypatch.setenv("LIPWALK_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["run", str(SCENARIOS / "equilibrium.toml")]) == 0
    assert (tmp_path / "env" / "summary.json").exists()


def test_missing_field_exit_2(tmp_path, capsys):
    text = (SCENARIOS / "equilibrium.toml").read_text().replace("mass = 32.0", "")
    path = tmp_path / "bad.toml"
    path.write_text(text)
    assert main(["run", str(path), "-o", str(tmp_path / "out")]) == 2
    assert "params.mass" in capsys.readouterr().err


def test_parse_error_exit_2(tmp_path, capsys):
    path = tmp_path / "bad.toml"
    path.write_text("n_steps = \n")
    assert main(["run", str(path), "-o", str(tmp_path / "out")]) == 2
    assert "line 1" in capsys.readouterr().err


def test_missing_file_exit_2(tmp_path):
    assert main(["run", str(tmp_path / "nope.toml")]) == 2


def test_invariant_violation_exit_3(tmp_path):
    assert main(["run", str(SCENARIOS / "deadbeat.toml"), "-o", str(tmp_path),
                 "--set", "params.ell=3.0"]) == 3


def test_dump_config_round_trip(tmp_path, capsys):
    assert main(["run", str(SCENARIOS / "schedule.toml"), "--dump-config"]) == 0
    dumped = capsys.readouterr().out
    path = tmp_path / "dumped.toml"
    path.write_text(dumped)
    assert main(["run", str(path), "--dump-config"]) == 0
    assert capsys.readouterr().out == dumped
    from lipwalk.scenario import load
    assert load(path) == load(SCENARIOS / "schedule.toml")


def test_dumped_config_with_changed_gravity_is_rejected(tmp_path, capsys):
    main(["run", str(SCENARIOS / "deadbeat.toml"), "--dump-config"])
    path = tmp_path / "dumped.toml"
    path.write_text(capsys.readouterr().out)
    assert main(["run", str(path), "-o", str(tmp_path / "o"), "--set", "params.gravity=9.5"]) == 3


def test_verify_default_exit_0(capsys):
    assert main(["verify"]) == 0
    assert "FAIL" not in capsys.readouterr().out


def test_verify_corrupted_ell_exit_3():
    ell = math.sqrt(9.81 / 0.9)
    assert main(["verify", "--n", "10", "--set", f"ell={ell!r}", "--set", "gravity=9.5"]) == 3


def test_verify_deterministic_json(capsys):
    main(["verify", "--n", "1", "--seed", "5", "--json"])
    first = capsys.readouterr().out
    main(["verify", "--n", "1", "--seed", "5", "--json"])
    assert capsys.readouterr().out == first
    assert json.loads(first)["passed"] is True


def test_verify_bad_parameter_exit_2():
    assert main(["verify", "--set", "mass=-3"]) == 2
    assert main(["verify", "--set", "speed=3"]) == 2


def test_compare_zero_noise_identical(tmp_path):
    assert main(["compare", str(SCENARIOS / "deadbeat.toml"), "-o", str(tmp_path)]) == 0
    result = json.loads((tmp_path / "comparison.json").read_text())
    assert result["identical"] is True
    for name in ("samples.csv", "steps.csv"):
        assert (tmp_path / "am" / name).read_bytes() == (tmp_path / "baseline" / name).read_bytes()


def test_compare_velocity_offset(tmp_path):
    assert main(["compare", str(SCENARIOS / "comparison.toml"), "-o", str(tmp_path)]) == 0
    result = json.loads((tmp_path / "comparison.json").read_text())
    assert result["identical"] is False
    predicted = result["predicted_baseline_L_error"]
    for err in result["baseline_per_step_L_error"][1:]:
        assert err == pytest.approx(predicted, rel=1e-9)
    assert result["am_max_step_L_rel_error"] <= 1e-9


def test_module_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "lipwalk", "run", str(SCENARIOS / "equilibrium.toml"),
                           "-o", str(tmp_path)], capture_output=True, text=True)
    assert proc.returncode == 0, proc.stderr
