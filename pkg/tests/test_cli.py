#!/usr/bin/env python3

import json
from pathlib import Path

import pytest
from mock import patch

from coordination_core.main import (
    EXIT_BOUNDARY,
    EXIT_INVALID,
    EXIT_MEMORY,
    EXIT_OK,
    EXIT_VERIFICATION,
    main,
)
from coordination_core.verification import VerificationError

CONFIG_DIR = Path(__file__).parent.resolve() / "test_configs"


def test_nu_of_zero(capsys):
    assert main(["nu", "--tiling", "ammann-beenker", "--z", "0,0,0,0"]) == EXIT_OK
    assert capsys.readouterr().out == "1\n"


def test_nu_of_the_unit_vector_as_json(capsys):
    assert main(["nu", "--tiling", "shield", "--z", "1,0,0,0", "--format", "json", "-q"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["nu"] == {"p": 2, "q": 0, "r": 3, "d": 3}
    assert document["n"] == 12


def test_l1_table_to_file(tmp_path):
    output = tmp_path / "ab.csv"
    argv = ["coordination", "--tiling", "ammann-beenker", "--method", "l1", "--kmax", "7",
            "--output", str(output), "-q"]
    assert main(argv) == EXIT_OK
    lines = output.read_text().splitlines()
    assert lines[0] == "k,p,q,r,float,method"
    assert lines[7] == "7,-176,148,1,33.304,l1"
    assert (tmp_path / "ab_contributions.csv").exists()


def test_shelling_uses_the_radius_bound(capsys):
    assert main(["shelling", "--tiling", "ammann-beenker", "--radius", "1", "-q"]) == EXIT_OK
    rows = capsys.readouterr().out.splitlines()
    # header, r^2 = 2-sqrt(2) and r^2 = 1
    assert len(rows) == 3


def test_window_json(capsys):
    assert main(["window", "--tiling", "shield", "--format", "json", "-q"]) == EXIT_OK
    document = json.loads(capsys.readouterr().out)
    assert document["area"] == {"p": 6, "q": 3, "r": 1, "d": 3}
    assert len(document["vertices"]) == 12


def test_boundary_hit():
    argv = ["patch", "--tiling", "ammann-beenker", "--shift", "1/2,0", "--radius", "3", "-q"]
    assert main(argv) == EXIT_BOUNDARY


@pytest.mark.parametrize("argv", [
    ["coordination", "--tiling", "shield", "--method", "l1"],
    ["fig2", "--tiling", "shield"],
    ["nu", "--z", "1,2"],
    ["patch", "--radius", "-3"],
    ["shelling", "--format", "svg"],
], ids=["l1-on-shield", "fig2-on-shield", "short-z", "negative-radius", "shelling-svg"])
def test_invalid_runs(argv):
    assert main(argv + ["-q"]) == EXIT_INVALID


def test_usage_errors():
    with pytest.raises(SystemExit) as caught:
        main(["tile"])
    assert caught.value.code == 2
    with pytest.raises(SystemExit):
        main(["nu", "-v", "-q"])


def test_not_enough_memory():
    with patch("coordination_core.run_base.virtual_memory", return_value=(0, 0)):
        assert main(["patch", "--tiling", "ammann-beenker", "--radius", "5", "-q"]) == EXIT_MEMORY


def test_failed_verification_still_writes_the_report(tmp_path):
    report = tmp_path / "report.txt"
    with patch("coordination_core.run_base.VerificationSuite") as suite:
        suite.return_value.run.side_effect = VerificationError("1 checks failed: integrality")
        suite.return_value.as_dicts.return_value = [
            {"name": "integrality", "passed": False, "detail": "s_c(3) is not an integer"},
        ]
        assert main(["verify", "--output", str(report), "-q"]) == EXIT_VERIFICATION
    assert report.read_text() == "FAIL integrality: s_c(3) is not an integer\n"


def test_log_files_and_saved_config(tmp_path):
    output = tmp_path / "nu.txt"
    log_path = tmp_path / "run.log"
    argv = ["nu", "--tiling", "ammann-beenker", "--z", "1,0,0,0", "--output", str(output),
            "--log", str(log_path), "--save-config"]
    assert main(argv) == EXIT_OK
    assert output.read_text() == "1/2\n"
    assert "Running nu on ammann-beenker" in log_path.read_text()
    results = (tmp_path / "run_results.log").read_text()
    record = json.loads(results.splitlines()[0])
    assert record["nu"] == {"p": 1, "q": 0, "r": 2, "d": 2}
    assert record["z"] == [1, 0, 0, 0]
    assert "Running nu" not in results
    saved = tmp_path / "nu.txt.config.toml"
    assert saved.exists()
    assert main(["nu", "--config", str(saved), "--output", str(tmp_path / "again.txt"), "-q"]) == EXIT_OK
    assert (tmp_path / "again.txt").read_text() == "1/2\n"


@pytest.mark.slow
def test_verify_small_scope(tmp_path):
    report = tmp_path / "report.json"
    argv = ["verify", "--config", str(CONFIG_DIR / "config.yaml"), "--format", "json",
            "--output", str(report), "--threads", "2", "-q"]
    assert main(argv) == EXIT_OK
    document = json.loads(report.read_text())
    assert document["passed"]
    assert {check["name"] for check in document["checks"]} >= {"reference tables", "complete shells"}
