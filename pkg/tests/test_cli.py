"""
Command line entry points: exit codes, deterministic JSON and the CSV export
"""

import json

import pandas as pd

from app.cli import EXIT_CONFIG, EXIT_OK, main


def test_norm_command_passes(tmp_path):
    """norm on e_1 + e_2 exits 0 and reports both norms"""
    out = tmp_path / "norm.json"
    assert main(["--out", str(out), "norm", "1:1 2:1", "--ell", "2"]) == EXIT_OK
    data = json.loads(out.read_text(encoding="utf-8"))
    assert data["command"] == "norm"
    assert data["verdict"] == "pass"
    assert data["results"]["vector"] == "1:1/1 2:1/1"
    assert data["results"]["s_norm"]["lo"].startswith("1.26185950714")
    assert "ell_norm" in data["results"]


def test_norm_report_is_deterministic(tmp_path):
    """Two runs with the same arguments produce identical bytes"""
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    main(["--out", str(first), "norm", "1:1 3:-1/2 4:3/4", "--ell", "2", "--r", "2"])
    main(["--out", str(second), "norm", "1:1 3:-1/2 4:3/4", "--ell", "2", "--r", "2"])
    assert first.read_bytes() == second.read_bytes()


def test_tree_command_passes(tmp_path):
    """Tree identities and the default tree vector bound"""
    out = tmp_path / "tree.json"
    assert main(["--out", str(out), "tree", "(2:(3)(4))", "--ks", "2,4,16"]) == EXIT_OK
    data = json.loads(out.read_text(encoding="utf-8"))
    names = {r["harness"] for r in data["reports"]}
    assert "tree_identities" in names


def test_missing_system_file_is_a_config_error(tmp_path):
    """Configuration errors exit with status 2"""
    missing = tmp_path / "nope.json"
    assert main(["--system", str(missing), "params"]) == EXIT_CONFIG


def test_bad_literal_is_an_input_error(tmp_path):
    """Malformed vectors are input errors, not failed checks"""
    assert main(["--out", str(tmp_path / "x.json"), "norm", "1:x 2:1"]) == EXIT_CONFIG


def test_csv_export(tmp_path):
    """--csv writes one row per check"""
    out, table = tmp_path / "tree.json", tmp_path / "checks.csv"
    main(["--out", str(out), "--csv", str(table), "tree", "(2:(3)(4))"])
    frame = pd.read_csv(table)
    assert list(frame.columns) == ["harness", "check", "verdict", "hard", "conditional"]
    assert "alpha_beta_sum_is_one" in set(frame["check"])
    assert set(frame["verdict"]) == {"pass"}
