"""End-to-end tests of the command line interface."""

import json
import math
import subprocess
import sys

import pytest

from ruintax import cli


def run_cli(args, capsys):
    code = cli.main(args)
    out, err = capsys.readouterr()
    return code, out, err


class TestApprox:
    def test_finite_value(self, capsys, tmp_path):
        out_file = tmp_path / "res.json"
        code, out, err = run_cli(
            ["approx", "--u", "5", "--c", "0.1", "--sigma", "1", "--delta", "0.05",
             "--T", "20", "--gamma", "0.1", "--format", "json",
             "--out", str(out_file)], capsys)
        assert code == 0, err
        payload = json.loads(out_file.read_text())
        row = payload["rows"][0]
        cols = payload["columns"]
        value = row[cols.index("asymptotic")]
        assert value == pytest.approx(0.0363, abs=1e-4)
        assert row[cols.index("log_asymptotic")] == pytest.approx(math.log(value))
        assert payload["config"]["seed"] == 0  # defaults recorded

    def test_infinite_needs_constant(self, capsys):
        code, out, err = run_cli(
            ["approx", "--u", "5", "--c", "0.1", "--sigma", "1", "--delta", "0.05",
             "--gamma", "0.1", "--infinite"], capsys)
        assert code == 2
        assert "phat" in err

    def test_infinite_with_given_constant(self, capsys):
        code, out, err = run_cli(
            ["approx", "--u", "5", "--c", "0.1", "--sigma", "1", "--delta", "0.05",
             "--gamma", "0.1", "--infinite", "--phat", "2.48", "--format", "json"],
            capsys)
        assert code == 0
        payload = json.loads(out)
        value = payload["rows"][0][payload["columns"].index("asymptotic")]
        assert value == pytest.approx(0.0467, abs=1e-4)

    def test_invalid_combination_reports_constraint(self, capsys):
        code, out, err = run_cli(
            ["approx", "--u", "5", "--c", "0.1", "--sigma", "1", "--delta", "-0.05",
             "--gamma", "0.1", "--infinite", "--phat", "2.48"], capsys)
        assert code == 2
        assert "delta > 0" in err


class TestRoundTrip:
    def test_config_reproduces_bit_identical(self, capsys, tmp_path):
        args = ["simulate", "--u", "2", "--c", "0.3", "--sigma", "0.9",
                "--delta", "0.04", "--gamma", "0.2", "--T", "6",
                "--n-paths", "2000", "--step", "0.02", "--seed", "11",
                "--format", "json"]
        code, out1, _ = run_cli(args, capsys)
        assert code == 0
        payload = json.loads(out1)
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps(payload["config"]))
        code, out2, _ = run_cli(["simulate", "--config", str(cfg_file),
                                 "--format", "json"], capsys)
        assert code == 0
        assert out1 == out2

    def test_flags_override_config(self, capsys, tmp_path):
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps({"u": 5.0, "c": 0.1, "sigma": 1.0,
                                        "delta": 0.05, "gamma": 0.1, "T": 20.0}))
        code, out, _ = run_cli(["approx", "--config", str(cfg_file),
                                "--gamma", "0.2", "--format", "json"], capsys)
        payload = json.loads(out)
        assert payload["config"]["gamma"] == 0.2
        value = payload["rows"][0][payload["columns"].index("asymptotic")]
        assert value == pytest.approx(0.0402, abs=1e-4)

    def test_nested_config_rejected(self, capsys, tmp_path):
        cfg_file = tmp_path / "cfg.json"
        cfg_file.write_text(json.dumps({"params": {"u": 5.0}}))
        code, out, err = run_cli(["approx", "--config", str(cfg_file)], capsys)
        assert code == 2
        assert "flat" in err


class TestCsvOutput:
    def test_lossless_parse_back(self, capsys, tmp_path):
        out_file = tmp_path / "t1.csv"
        code, _, _ = run_cli(["table", "--which", "1", "--out", str(out_file)],
                             capsys)
        assert code == 0
        lines = out_file.read_text().strip().split("\n")
        assert lines[0].startswith("# config = ")
        json.loads(lines[0][len("# config = "):])  # parseable embedded config
        header = lines[1].split(",")
        assert header[:7] == ["u", "c", "sigma", "delta", "T", "gamma", "asymptotic"]
        assert "asymptotic_display" in header
        rows = [line.split(",") for line in lines[2:]]
        assert len(rows) == 12
        i_val = header.index("asymptotic")
        i_disp = header.index("asymptotic_display")
        for row in rows:
            full = float(row[i_val])
            assert repr(full) == row[i_val]  # full precision round-trips
            assert f"{full:.4f}" == row[i_disp]


class TestTable:
    def test_table2_requires_constant_source(self, capsys):
        code, _, err = run_cli(["table", "--which", "2"], capsys)
        assert code == 2
        assert "phat" in err

    def test_table2_with_given_phat_and_ratio(self, capsys):
        code, out, _ = run_cli(["table", "--which", "2", "--phat", "3.0",
                                "--format", "json"], capsys)
        assert code == 0
        payload = json.loads(out)
        cols = payload["columns"]
        rows = payload["rows"]
        assert len(rows) == 8
        iv, ig = cols.index("asymptotic"), cols.index("gamma")
        for r1, r2 in zip(rows[0::2], rows[1::2]):
            # consecutive rows differ only in gamma: exact prefactor ratio
            assert r2[iv] / r1[iv] == pytest.approx(
                (1 - r1[ig]) / (1 - r2[ig]), rel=1e-12)


class TestConstantCommand:
    def test_json_record(self, capsys):
        code, out, _ = run_cli(
            ["constant", "--family", "piterbarg", "--a", "1.0",
             "--n-paths", "2000", "--eta", "0.02", "--seed", "4",
             "--format", "json"], capsys)
        assert code == 0
        payload = json.loads(out)
        rec = payload["record"]
        assert rec["spec"]["family"] == "piterbarg"
        assert rec["spec"]["s2"] is None  # unbounded interval
        assert rec["n"] == 2000
        assert 1.5 < rec["estimate"] < 2.5
        assert rec["stderr"] > 0

    def test_invalid_family_parameter(self, capsys):
        code, _, err = run_cli(
            ["constant", "--family", "piterbarg", "--a", "-1"], capsys)
        assert code == 2
        assert "a > 0" in err


class TestRuinTimeCommand:
    def test_csv_samples(self, capsys, tmp_path):
        out_file = tmp_path / "taus.csv"
        code, out, _ = run_cli(
            ["ruin-time", "--u", "1", "--c", "1", "--sigma", "1", "--delta", "0",
             "--gamma", "0", "--T", "2", "--n-paths", "500", "--step", "0.01",
             "--seed", "3", "--out", str(out_file)], capsys)
        assert code == 0
        lines = out_file.read_text().strip().split("\n")
        header = lines[1].split(",")
        assert header[:3] == ["path_id", "ruined", "tau"]
        assert len(lines) == 2 + 500
        assert "estimate:" in out


class TestVerifyLemmas:
    def test_passes_on_reference_params(self, capsys):
        code, out, _ = run_cli(
            ["verify-lemmas", "--u", "5", "--c", "0.1", "--sigma", "1",
             "--delta", "0.05", "--gamma", "0.1", "--T", "20",
             "--format", "json"], capsys)
        assert code == 0
        payload = json.loads(out)
        assert payload["all_pass"] is True
        names = [r[0] for r in payload["rows"]]
        assert "variance_argmax_at_origin_horizon" in names
        assert "spread_boundary_argmax_at_critical_point" in names


class TestEntryPoint:
    def test_module_invocation(self):
        proc = subprocess.run(
            [sys.executable, "-m", "ruintax.cli", "approx", "--u", "5", "--c", "0.1",
             "--sigma", "1", "--delta", "0.05", "--T", "20", "--gamma", "0.1",
             "--format", "json"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        payload = json.loads(proc.stdout)
        assert payload["command"] == "approx"
