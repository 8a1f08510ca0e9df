"""Tests for CLI commands."""

import json
import sys
from pathlib import Path
from unittest.mock import patch

import pytest

import controlled_modules
from controlled_modules.cli import build_parser, exit_code_for, main
from controlled_modules.config import reset_config
from controlled_modules.constants import ENV_REPORTS_DIR, ExitCode
from controlled_modules.exceptions import SchemaError, WitnessError

SCENARIOS = Path(controlled_modules.__file__).parent / "scenarios"
PUSHOUT = SCENARIOS / "pushout_control.json"
SPLIT = SCENARIOS / "split_projection.json"


def output(capsys):
    return json.loads(capsys.readouterr().out)


class TestParser:
    """Tests for argument parsing."""

    def test_main_no_args(self):
        """Test main without arguments."""
        with patch.object(sys, "argv", ["controlled-modules"]):
            with pytest.raises(SystemExit) as exc_info:
                main()
            assert exc_info.value.code == 2

    def test_unknown_category(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["k0", "--category", "spheres"])

    def test_exit_codes(self):
        assert exit_code_for(SchemaError([("", "bad")])) == ExitCode.INPUT_ERROR
        assert exit_code_for(WitnessError("H(0) = start")) == ExitCode.CONTRACT_FAILURE


class TestRunAndValidate:
    """Tests for run and validate."""

    def test_run_prints_report(self, capsys):
        with patch.object(sys, "argv", ["controlled-modules", "run", str(PUSHOUT), "--no-timings"]):
            main()
        report = output(capsys)
        assert report["ok"] is True
        assert "seconds" not in report

    def test_run_saves_under_reports_dir(self, tmp_path, monkeypatch, capsys):
        monkeypatch.setenv(ENV_REPORTS_DIR, str(tmp_path))
        reset_config()
        try:
            main(["run", str(SPLIT), "--save"])
        finally:
            reset_config()
        saved = tmp_path / "split_projection.report.json"
        assert saved.exists()
        assert "Report:" in capsys.readouterr().out

    def test_run_failing_assertion(self, tmp_path, capsys):
        doc = json.loads(PUSHOUT.read_text())
        doc["steps"][-1]["equals"] = 4
        path = tmp_path / "broken.json"
        path.write_text(json.dumps(doc))
        with pytest.raises(SystemExit) as exc_info:
            main(["run", str(path)])
        assert exc_info.value.code == ExitCode.CONTRACT_FAILURE
        assert "Assertion failed" in capsys.readouterr().err

    def test_validate_valid(self, capsys):
        main(["validate", str(PUSHOUT)])
        assert "valid" in capsys.readouterr().out

    def test_validate_lists_diagnostics(self, tmp_path, capsys):
        path = tmp_path / "bad.yaml"
        path.write_text("version: '1.0'\nsteps:\n  - op: explode\n  - op: k0\n")
        with pytest.raises(SystemExit) as exc_info:
            main(["validate", str(path)])
        assert exc_info.value.code == ExitCode.INPUT_ERROR
        err = capsys.readouterr().err
        assert "/steps/0/op" in err
        assert "/steps/1" in err

    def test_missing_file(self, tmp_path):
        with pytest.raises(SystemExit) as exc_info:
            main(["run", str(tmp_path / "missing.json")])
        assert exc_info.value.code == ExitCode.INPUT_ERROR


class TestK0Command:
    """Tests for the k0 command."""

    def test_colored_sets(self, capsys):
        main(["k0", "--category", "colored-sets", "--size", "1"])
        assert output(capsys)["group"] == {"rank": 1, "torsion": []}

    def test_relative(self, capsys):
        main(["k0", "-c", "colored-sets", "-s", "1", "--sub", "equal-AC", "--relative"])
        result = output(capsys)
        assert result["relative"]["isomorphic"] is False

    def test_stability(self, capsys):
        main(["k0", "-c", "zakharevich", "--stability", "1,2"])
        assert output(capsys)["stability"]["stable"] is True

    def test_from_file(self, tmp_path, capsys):
        path = tmp_path / "cat.json"
        path.write_text(json.dumps({"name": "pair", "objects": ["0", "a", "b"], "zero": "0"}))
        main(["k0", "--from", str(path)])
        assert output(capsys)["group"] == {"rank": 2, "torsion": []}

    def test_out_file(self, tmp_path, capsys):
        out = tmp_path / "k0.json"
        main(["--out", str(out), "k0"])
        assert "Wrote:" in capsys.readouterr().out
        assert json.loads(out.read_text())["size"] == 1

    def test_negative_size(self):
        with pytest.raises(SystemExit) as exc_info:
            main(["k0", "--size", "-1"])
        assert exc_info.value.code == ExitCode.CONTRACT_FAILURE


class TestConstructionCommands:
    """Tests for the single-step commands on an input document."""

    def test_telescope(self, capsys):
        main(["telescope", str(SPLIT), "--map", "e", "--stages", "2", "--shift"])
        result = output(capsys)["result"]
        assert result["stages"] == 2
        assert result["shift_homotopy"] is True

    def test_split_idempotent(self, capsys):
        main(["split-idempotent", str(SPLIT), "--map", "e", "--stages", "1"])
        assert output(capsys)["result"]["verified"] is True

    def test_unresolved_map(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["telescope", str(SPLIT), "--map", "nope"])
        assert exc_info.value.code == ExitCode.INPUT_ERROR
        assert "Unresolved reference: nope" in capsys.readouterr().err

    def test_check_control_minimal(self, capsys):
        main(["check-control", str(PUSHOUT), "--subject", "B"])
        result = output(capsys)["result"]
        assert result["minimal"] == {"alpha": "1/2"}

    def test_check_control_violation(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["check-control", str(PUSHOUT), "--subject", "B", "--condition", "1/4"])
        assert exc_info.value.code == ExitCode.CONTRACT_FAILURE
        assert "Control violated" in capsys.readouterr().err

    def test_pushout_with_certificate(self, capsys):
        main(["--emit-certificate", "pushout", str(PUSHOUT), "--inclusion", "i", "--map", "f",
              "--conditions", "1/2", "0", "2"])
        result = output(capsys)["result"]
        assert result["certificates"]["D"]["condition"] == {"alpha": "5/2"}
        assert result["certificate"]["kind"] == "module"

    def test_cylinder(self, capsys):
        main(["cylinder", str(PUSHOUT), "--map", "i"])
        assert output(capsys)["result"]["axioms"] is True

    def test_fill_horn(self, capsys):
        main(["fill-horn", str(PUSHOUT), "--module", "B", "--dim", "1", "--missing", "0",
              "--faces", '{"1": [[1, "a", []]]}'])
        assert output(capsys)["result"]["filler"]

    def test_bad_faces_argument(self, capsys):
        with pytest.raises(SystemExit) as exc_info:
            main(["fill-horn", str(PUSHOUT), "--module", "B", "--dim", "1", "--missing", "0",
                  "--faces", "{1:"])
        assert exc_info.value.code == ExitCode.INPUT_ERROR

    def test_interval_calc(self, capsys):
        main(["interval-calc", "fwd,bwd", "--concat", "fwd", "--base", "1"])
        result = output(capsys)["result"]
        assert result["length"] == 3
        assert result["base"] == 1


class TestExportLoad:
    """Tests for export and load."""

    def test_export_then_load(self, tmp_path, capsys):
        out = tmp_path / "B.json"
        main(["--out", str(out), "export", str(PUSHOUT), "--ref", "B"])
        capsys.readouterr()
        main(["load", str(out)])
        doc = output(capsys)
        assert doc["kind"] == "module"
        assert [c["name"] for c in doc["module"]["cells"]] == ["a", "b", "e"]

    def test_export_yaml(self, capsys):
        main(["export", str(PUSHOUT), "--ref", "f", "--format", "yaml"])
        assert "kind: map" in capsys.readouterr().out
