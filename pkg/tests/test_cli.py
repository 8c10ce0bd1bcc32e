"""CLI surface: subcommands, exit codes, file outputs."""

import json

from guardsim.cli import main


def test_export_then_run(tmp_path, capsys):
    out = tmp_path / "iso.json"
    assert main(["export-builtin", "iso-sc-27", "--out", str(out)]) == 0
    code = main(["run", "--scenario", str(out),
                 "--trace-out", str(tmp_path / "trace.ndjson")])
    assert code == 0
    stdout = capsys.readouterr().out
    assert "G raises A's flag for abort" in stdout
    assert (tmp_path / "trace.ndjson").exists()


def test_run_attack_exit_code(tmp_path):
    cfg = {"protocol": "iso-sc-27", "guardian": False, "attack": "classic",
           "seed": 1}
    path = tmp_path / "attack.json"
    path.write_text(json.dumps(cfg))
    assert main(["run", "--scenario", str(path)]) == 2


def test_bad_scenario_config_exit(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text(json.dumps({"protocol": "no-such-protocol"}))
    assert main(["run", "--scenario", str(path)]) == 64


def test_cases_command(capsys):
    assert main(["cases", "--protocol", "iso-sc-27"]) == 0
    out = capsys.readouterr().out
    assert "case 2 -> T3" in out
    assert "E_{1,2}(B)" in out


def test_montecarlo_command(capsys):
    assert main(["montecarlo", "--trials", "2000", "--nonce-bits", "8"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["analytic_rate"] == 4 / 256


def test_matrix_command(tmp_path, capsys):
    out = tmp_path / "matrix.json"
    assert main(["matrix", "--protocols", "iso-sc-27",
                 "--json-out", str(out)]) == 0
    stdout = capsys.readouterr().out
    assert "iso-sc-27" in stdout
    payload = json.loads(out.read_text())
    row = payload["rows"][0]
    assert row["viable_topologies"] == ["A"]
    assert row["cells"]["B"] == "None"
