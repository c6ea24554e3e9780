"""End-to-end command-line behavior: parsing, formats, determinism."""

import json

import numpy as np
import pytest

from cavitherm.cli import build_parser, main
from cavitherm.sweep import CSV_COLUMNS, SCHEMA_HEADER

GRID_ARGS = ["--grid-a0", "1:3:3", "--grid-omega0", "0.4:0.8:2",
             "--n-modes", "4"]


def _parse_csv(text: str):
    lines = text.strip().splitlines()
    assert lines[0] == SCHEMA_HEADER
    assert lines[1] == ",".join(CSV_COLUMNS)
    return [dict(zip(CSV_COLUMNS, line.split(","))) for line in lines[2:]]


def test_point_stdout(capsys):
    code = main(["point", "--a0", "1.0", "--omega0", "0.5", "--n-modes", "4"])
    assert code == 0
    rows = _parse_csv(capsys.readouterr().out)
    assert len(rows) == 1
    assert float(rows[0]["T0"]) > 0.0
    assert rows[0]["error_code"] == ""


def test_point_failure_exit_code(capsys):
    code = main(["point", "--a0", "1.0", "--omega0", "0.5",
                 "--lambda0", "0.0", "--n-modes", "4"])
    assert code == 1
    captured = capsys.readouterr()
    rows = _parse_csv(captured.out)
    assert rows[0]["error_code"] == "NoUniqueFixedPoint"
    assert "NoUniqueFixedPoint" in captured.err


def test_point_requires_inputs():
    with pytest.raises(SystemExit):
        main(["point", "--a0", "1.0"])


def test_sweep_csv_and_json(tmp_path, capsys):
    out_csv = tmp_path / "grid.csv"
    assert main(["sweep", *GRID_ARGS, "--out", str(out_csv)]) == 0
    rows = _parse_csv(out_csv.read_text())
    assert len(rows) == 6
    # row-major order: a0 varies slowest
    assert [float(r["a0"]) for r in rows[:2]] == [1.0, 1.0]
    assert float(rows[0]["omega0"]) == pytest.approx(0.4)
    # sweep alone leaves the slope column empty
    assert all(r["dT0_da0"] == "" for r in rows)

    assert main(["sweep", *GRID_ARGS, "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert len(doc["rows"]) == 6
    assert doc["metadata"]["a0_count"] == 3


def test_slope_fills_derivative_and_diagnostics(tmp_path, capsys):
    assert main(["slope", *GRID_ARGS, "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    slopes = [r["dT0_da0"] for r in doc["rows"]]
    assert all(s != "" for s in slopes)
    diag = doc["metadata"]["diagnostics"]
    assert set(diag) == {"phase_boundaries", "crossing_ratios", "mode_sweeps"}
    assert diag["crossing_ratios"]["3"] == pytest.approx(0.25)
    assert len(diag["phase_boundaries"]["1"]) == 3


def test_slope_workers_bit_identical(tmp_path):
    one = tmp_path / "w1.csv"
    two = tmp_path / "w2.csv"
    assert main(["slope", *GRID_ARGS, "--workers", "1", "--out", str(one)]) == 0
    assert main(["slope", *GRID_ARGS, "--workers", "2", "--out", str(two)]) == 0
    assert one.read_bytes() == two.read_bytes()


def test_config_file_with_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"a0": 1.0, "omega0": 0.5, "n_modes": 4,
                               "lambda0": 0.02}))
    assert main(["point", "--config", str(cfg)]) == 0
    rows = _parse_csv(capsys.readouterr().out)
    assert float(rows[0]["lambda0"]) == 0.02
    assert rows[0]["n_modes"] == "4"
    # explicit flag wins over the file
    assert main(["point", "--config", str(cfg), "--lambda0", "0.03"]) == 0
    rows = _parse_csv(capsys.readouterr().out)
    assert float(rows[0]["lambda0"]) == 0.03


def test_modes_subcommand(capsys):
    assert main(["modes", "--grid-a0", "1:2:3", "--omega0", "0.5",
                 "--mode-list", "4,6", "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["n_list"] == [4, 6]
    assert len(doc["t0"]) == 2 and len(doc["t0"][0]) == 3
    assert doc["agreement_limit"][-1] == pytest.approx(2.0)

    assert main(["modes", "--grid-a0", "1:2:3", "--omega0", "0.5",
                 "--mode-list", "4,6"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "# cavitherm-modes 1"
    assert lines[1].startswith("n_modes,a0,T0,")
    assert len(lines) == 2 + 2 * 3


def test_units_subcommand(capsys):
    assert main(["units", "--length", "1", "--a0", "0.25"]) == 0
    out = capsys.readouterr().out
    assert "2.29119e+15 g" in out
    assert main(["units", "--length", "1", "--a0", "0.25", "--t0", "0.5",
                 "--format", "json"]) == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["acceleration_g"] == pytest.approx(2.2912e15, rel=1e-4)
    assert doc["temperature_k"] > 0.0
    with pytest.raises(SystemExit):
        main(["units", "--a0", "0.25"])


def test_verify_runs_every_reference_check(capsys, tmp_path):
    path = tmp_path / "verify.txt"
    assert main(["verify", "--out", str(path)]) == 0
    capsys.readouterr()
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "reference-route verification"
    assert lines[-1] == "8 of 8 checks passed"
    checks = lines[1:-1]
    assert len(checks) == 8
    assert all(line.lstrip().startswith("pass") for line in checks)


def test_seedless_flag_accepted(capsys):
    assert main(["point", "--a0", "1.0", "--omega0", "0.5", "--n-modes", "4",
                 "--seedless"]) == 0
    capsys.readouterr()


def test_grid_argument_validation():
    parser = build_parser()
    with pytest.raises(SystemExit):
        parser.parse_args(["sweep", "--grid-a0", "1:2"])
    with pytest.raises(SystemExit):
        parser.parse_args(["sweep", "--grid-a0", "2:1:5"])
    with pytest.raises(SystemExit):
        parser.parse_args(["sweep", "--grid-a0", "0:1:5"])
    with pytest.raises(SystemExit):
        parser.parse_args(["modes", "--mode-list", "8,4"])
    with pytest.raises(SystemExit):
        parser.parse_args(["nonsense"])
