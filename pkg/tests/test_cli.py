"""Tests for the command-line driver: formats, exit codes, determinism."""

import json

import numpy as np
import pytest

from qvlab import cli
from qvlab.acceptance import CheckResult


class TestExample:
    def test_csv_columns(self, tmp_path):
        out = tmp_path / "diamond.csv"
        assert cli.main(["example", "diamond", "--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "x,branch_1,branch_2"
        assert len(lines) == 1026

    def test_json_payload(self, tmp_path):
        out = tmp_path / "sin.json"
        code = cli.main(["example", "sin", "--samples", "129", "--out", str(out), "--format", "json"])
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["name"] == "sin"
        assert len(payload["x"]) == 129
        assert len(payload["branches"]) == 2

    def test_level_zero_is_usage_error(self, tmp_path):
        code = cli.main(["example", "cantor-diamond", "--level", "0", "--out", str(tmp_path / "x.csv")])
        assert code == 2

    def test_missing_level_is_usage_error(self, tmp_path):
        code = cli.main(["example", "cantor-diamond", "--out", str(tmp_path / "x.csv")])
        assert code == 2

    def test_unknown_name_is_usage_error(self, tmp_path):
        code = cli.main(["example", "nonsense", "--out", str(tmp_path / "x.csv")])
        assert code == 2


class TestAudit:
    def test_quasi_bound(self, tmp_path):
        out = tmp_path / "audit.json"
        code = cli.main(
            ["audit", "cantor-diamond", "--level", "4", "--mode", "quasi", "--depth", "6",
             "--out", str(out), "--format", "json"]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["mode"] == "quasi_k"
        assert float(payload["supremum"]) <= 4.0 + 1e-9

    def test_pluri_losange_reports_infinity_but_succeeds(self, tmp_path):
        out = tmp_path / "audit.json"
        code = cli.main(
            ["audit", "pluri-losange-demo", "--mode", "quasi", "--depth", "5", "--out", str(out), "--format", "json"]
        )
        assert code == 0
        assert json.loads(out.read_text())["supremum"] == "inf"

    def test_almost_mode(self, tmp_path):
        out = tmp_path / "audit.csv"
        code = cli.main(
            ["audit", "cantor-losange", "--level", "3", "--mode", "almost", "--alpha", "0.5",
             "--depth", "6", "--out", str(out)]
        )
        assert code == 0
        header = out.read_text().splitlines()[0]
        assert header == "center,radius,dir_u,dir_min,figure_of_merit"

    def test_omega_mode(self, tmp_path):
        out = tmp_path / "omega.json"
        code = cli.main(
            ["audit", "sin", "--mode", "omega", "--radii", "0.1,0.2", "--centers", "51",
             "--out", str(out), "--format", "json"]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["mode"] == "omega"
        assert float(payload["supremum"]) < 0.05

    def test_threads_env_gives_identical_output(self, tmp_path, monkeypatch):
        args = ["audit", "cantor-diamond", "--level", "3", "--mode", "quasi", "--depth", "7", "--format", "json"]
        seq = tmp_path / "seq.json"
        par = tmp_path / "par.json"
        monkeypatch.setenv("QVLAB_THREADS", "1")
        assert cli.main(args + ["--out", str(seq)]) == 0
        monkeypatch.setenv("QVLAB_THREADS", "4")
        assert cli.main(args + ["--out", str(par)]) == 0
        assert seq.read_bytes() == par.read_bytes()


class TestBranchAndDecay:
    def test_branch_json(self, tmp_path):
        out = tmp_path / "branch.json"
        code = cli.main(
            ["branch", "cantor-diamond", "--level", "5", "--grid", "244", "--out", str(out), "--format", "json"]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert set(payload) == {"scan", "dimension"}
        assert len(payload["scan"]["x"]) == 244

    def test_branch_csv(self, tmp_path):
        out = tmp_path / "branch.csv"
        code = cli.main(["branch", "sin", "--grid", "101", "--out", str(out)])
        assert code == 0
        assert out.read_text().splitlines()[0] == "x,sigma,flagged"

    def test_decay_csv_and_slope(self, tmp_path, capsys):
        out = tmp_path / "decay.csv"
        code = cli.main(
            ["decay", "cantor-diamond", "--level", "4", "--center", "0.4", "--r0", "0.05", "--out", str(out)]
        )
        assert code == 0
        assert "slope=" in capsys.readouterr().out
        assert out.read_text().splitlines()[0] == "scale,radius,energy"


class TestDisk:
    def test_json_output(self, tmp_path):
        out = tmp_path / "disk.json"
        code = cli.main(
            ["disk", "--trace", "single-cos", "--samples", "256", "--modes", "32",
             "--out", str(out), "--format", "json"]
        )
        assert code == 0
        payload = json.loads(out.read_text())
        assert payload["dir_interior"] == pytest.approx(np.pi)
        assert payload["squeeze_margin"] == pytest.approx(0.0, abs=1e-12)

    def test_csv_output(self, tmp_path):
        out = tmp_path / "disk.csv"
        code = cli.main(["disk", "--trace", "sqrt-type", "--samples", "128", "--modes", "16", "--out", str(out)])
        assert code == 0
        assert out.read_text().splitlines()[0] == "angle,branch_1,branch_2"


class TestConfig:
    def test_config_round_trip(self, tmp_path):
        cfg = {
            "command": "example",
            "name": "losange",
            "out": str(tmp_path / "l.csv"),
            "format": "csv",
        }
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        assert cli.main(["--config", str(path)]) == 0
        assert (tmp_path / "l.csv").exists()

    def test_unknown_keys_rejected(self, tmp_path):
        cfg = {"command": "example", "name": "losange", "out": "x.csv", "format": "csv", "bogus": 1}
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps(cfg))
        assert cli.main(["--config", str(path)]) == 2

    def test_config_with_extra_flags_rejected(self, tmp_path):
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"command": "verify-all"}))
        assert cli.main(["--config", str(path), "example"]) == 2


class TestDeterminism:
    @pytest.mark.parametrize(
        "args",
        [
            ["example", "cantor-losange", "--level", "3"],
            ["audit", "cantor-diamond", "--level", "2", "--mode", "quasi", "--depth", "6"],
            ["decay", "double-line", "--center", "0.5", "--r0", "0.25"],
            ["disk", "--trace", "shifted-pair", "--samples", "128", "--modes", "16"],
        ],
    )
    def test_repeat_runs_are_byte_identical(self, tmp_path, args):
        for fmt in ("csv", "json"):
            a = tmp_path / f"a.{fmt}"
            b = tmp_path / f"b.{fmt}"
            assert cli.main(args + ["--out", str(a), "--format", fmt]) == 0
            assert cli.main(args + ["--out", str(b), "--format", fmt]) == 0
            assert a.read_bytes() == b.read_bytes()


class TestVerifyAll:
    def test_exit_codes_follow_results(self, monkeypatch, capsys):
        from qvlab import acceptance

        ok = CheckResult(1, "stub-pass", True, "fine")
        monkeypatch.setattr(acceptance, "CRITERIA", [(1, "stub-pass", lambda: ok)])
        assert cli.main(["verify-all"]) == 0
        assert "[PASS]" in capsys.readouterr().out

        bad = CheckResult(2, "stub-fail", False, "broken")
        monkeypatch.setattr(acceptance, "CRITERIA", [(2, "stub-fail", lambda: bad)])
        assert cli.main(["verify-all"]) == 1
        assert "[FAIL]" in capsys.readouterr().out

    def test_no_command_is_usage_error(self):
        assert cli.main([]) == 2
