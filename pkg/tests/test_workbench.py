"""Tests for scenarios, schema checks, export/load and reports."""

import json
from pathlib import Path

import pytest
import yaml

import controlled_modules
from controlled_modules.exceptions import (
    AssertionFailure,
    SchemaError,
    UnresolvedReferenceError,
    WitnessError,
    WorkbenchError,
)
from controlled_modules.k0 import AbelianGroupNF
from controlled_modules.modules import CellularModule, ModuleMap, modules_equal
from controlled_modules.rings import IntegerRing
from controlled_modules.telescope import interval
from controlled_modules.workbench import (
    Report,
    ScenarioRunner,
    StepOutcome,
    export,
    k0_summary,
    load,
    parse_scenario,
    parse_text,
    pointer,
    run_scenario,
    validate,
    write_report,
)

Z = IntegerRing()
SCENARIOS = Path(controlled_modules.__file__).parent / "scenarios"


def document(*steps):
    """An edge a -- b, a point and the map picking out a."""
    return {
        "version": "1.0",
        "name": "edge",
        "ring": {"kind": "Z"},
        "modules": {
            "M": {
                "cells": [
                    {"name": "a", "dim": 0},
                    {"name": "b", "dim": 0},
                    {"name": "e", "dim": 1, "attach": [[[1, "b", []]], [[1, "a", []]]]},
                ]
            },
            "P": {"cells": [{"name": "*", "dim": 0}]},
        },
        "maps": {"pa": {"source": "P", "target": "M", "images": [["*", [[1, "a", []]]]]}},
        "steps": list(steps),
    }


def edge_module():
    M = CellularModule(Z).attach_cell("a", 0).attach_cell("b", 0)
    return M.attach_cell("e", 1, (M.top("b"), M.top("a")))


class TestValidate:
    """Tests for schema diagnostics."""

    def test_valid_document(self):
        assert validate(document({"op": "cylinder", "map": "pa"})) == []

    def test_not_a_mapping(self):
        assert validate([]) == [("", "document must be a mapping")]

    def test_reports_every_violation(self):
        doc = document(
            {"op": "explode"},
            {"op": "pushout", "name": "P", "inclusion": "pa"},
            {"op": "cylinder", "name": "P", "map": "pa"},
            {"op": "k0"},
            {"op": "assert", "path": "P.cells"},
            {"op": "cylinder", "map": "pa", "provenance": "folklore"},
        )
        doc["extra"] = 1
        where = [w for w, _ in validate(doc)]
        assert "/extra" in where
        assert "/steps/0/op" in where
        assert "/steps/1" in where
        assert "/steps/2/name" in where
        assert "/steps/3" in where
        assert "/steps/4" in where
        assert "/steps/5/provenance" in where

    def test_module_checks(self):
        doc = document()
        doc["modules"]["M"]["cells"][2]["attach"] = [[[1, "b", []]]]
        doc["modules"]["P"]["cells"][0]["dim"] = -1
        where = [w for w, _ in validate(doc)]
        assert "/modules/M/cells/2/attach" in where
        assert "/modules/P/cells/0/dim" in where

    def test_version(self):
        doc = document()
        doc["version"] = "2.0"
        assert validate(doc)[0][0] == "/version"

    def test_pointer_escapes(self):
        assert pointer("maps", "a/b", "c~d") == "/maps/a~1b/c~0d"

    def test_parse_scenario_raises_all(self):
        doc = document({"op": "explode"}, {"op": "k0"})
        with pytest.raises(SchemaError) as exc_info:
            parse_scenario(doc)
        assert len(exc_info.value.diagnostics) == 2

    def test_malformed_json(self):
        with pytest.raises(SchemaError) as exc_info:
            parse_text('{"version": "1.0",\n "name": }')
        assert "line 2" in str(exc_info.value.diagnostics[0][1])

    def test_malformed_yaml(self):
        with pytest.raises(SchemaError):
            parse_text("name: [unclosed", "yaml")


class TestShippedScenarios:
    """Tests for the scenarios packaged with the workbench."""

    @pytest.mark.parametrize("path", sorted(SCENARIOS.glob("*.json")), ids=lambda p: p.stem)
    def test_runs(self, path):
        report = run_scenario(path)
        assert report.ok

    def test_pushout_certificates(self):
        report = run_scenario(SCENARIOS / "pushout_control.json")
        certificates = report.result("P")["certificates"]
        assert certificates["D"]["condition"] == {"alpha": "5/2"}
        assert certificates["leg_C"]["condition"] == {"alpha": "0"}

    def test_deterministic_without_timings(self):
        first = run_scenario(SCENARIOS / "split_projection.json")
        second = run_scenario(SCENARIOS / "split_projection.json")
        assert first.dumps(timings=False) == second.dumps(timings=False)
        assert "seconds" not in json.loads(first.dumps(timings=False))


class TestSteps:
    """Tests for individual step handlers."""

    def test_default_step_names(self):
        report = run_scenario(document({"op": "cylinder", "map": "pa"}))
        assert report.steps[0].name == "step0"
        assert report.result("step0")["cells"] == 5

    def test_registered_outputs(self):
        doc = document(
            {"op": "cylinder", "name": "T", "map": "pa"},
            {"op": "assert", "path": "T.axioms", "holds": True},
        )
        runner = ScenarioRunner(parse_scenario(doc))
        runner.run()
        assert "T" in runner.modules
        assert "T.front" in runner.maps

    def test_mapping_cylinder_over_zigzag(self):
        doc = document({"op": "mapping-cylinder", "name": "L", "map": "pa", "interval": "fwd,bwd"})
        runner = ScenarioRunner(parse_scenario(doc))
        report = runner.run()
        assert report.result("L")["interval"] == "fwd,bwd"
        assert "L.projection" in runner.maps

    def test_lift(self):
        doc = document({
            "op": "lift", "name": "w", "module": "M", "sub": ["a"], "dim": 1, "missing": 0,
            "faces": {"1": [[1, "a", []]]}, "target": [[1, "e", []]],
        })
        assert run_scenario(doc).result("w")["lift"] == [[1, "e", []]]

    def test_fill_horn(self):
        doc = document({"op": "fill-horn", "name": "w", "module": "M", "dim": 1, "missing": 0, "faces": {"1": [[1, "a", []]]}})
        filler = run_scenario(doc).result("w")["filler"]
        assert filler

    def test_faces_must_cover_the_horn(self):
        doc = document({"op": "fill-horn", "name": "w", "module": "M", "dim": 1, "missing": 0, "faces": {}})
        with pytest.raises(SchemaError):
            run_scenario(doc)

    def test_interval_calc(self):
        result = run_scenario(document({"op": "interval-calc", "name": "I", "interval": "fwd,bwd"})).result("I")
        assert result["interval"] == "fwd,bwd"
        assert result["length"] == 2
        assert result["ordered"] is False

    def test_verify_equivalence(self):
        doc = document({"op": "verify-equivalence", "name": "eq", "forward": "idP", "inverse": "idP"})
        doc["maps"]["idP"] = {"source": "P", "target": "P", "images": [["*", [[1, "*", []]]]]}
        assert run_scenario(doc).result("eq")["verified"] is True

    def test_verify_equivalence_rejects(self):
        doc = document({"op": "verify-equivalence", "name": "eq", "forward": "idP", "inverse": "zero"})
        doc["maps"]["idP"] = {"source": "P", "target": "P", "images": [["*", [[1, "*", []]]]]}
        doc["maps"]["zero"] = {"source": "P", "target": "P", "images": [["*", []]]}
        with pytest.raises(WitnessError):
            run_scenario(doc)

    def test_check_control_needs_space(self):
        with pytest.raises(WorkbenchError):
            run_scenario(document({"op": "check-control", "subject": "M"}))

    def test_unresolved_reference(self):
        with pytest.raises(UnresolvedReferenceError) as exc_info:
            run_scenario(document({"op": "cylinder", "map": "nope"}))
        assert exc_info.value.name == "nope"

    def test_assertion_failure(self):
        doc = document(
            {"op": "cylinder", "name": "T", "map": "pa"},
            {"op": "assert", "name": "cells", "path": "T.cells", "equals": 4},
        )
        with pytest.raises(AssertionFailure) as exc_info:
            run_scenario(doc)
        assert exc_info.value.step == "cells"

    def test_assertion_on_missing_path(self):
        doc = document(
            {"op": "cylinder", "name": "T", "map": "pa"},
            {"op": "assert", "path": "T.nothing", "holds": True},
        )
        with pytest.raises(UnresolvedReferenceError):
            run_scenario(doc)

    def test_export_and_load_steps(self, tmp_path):
        (tmp_path / "m.json").write_bytes(export(edge_module()))
        doc = document(
            {"op": "load", "name": "N", "path": "m.json"},
            {"op": "export", "name": "x", "ref": "N"},
        )
        runner = ScenarioRunner(parse_scenario(doc, base_dir=tmp_path))
        report = runner.run()
        assert modules_equal(runner.modules["N"], edge_module())
        assert report.result("x")["bytes"] == len(export(edge_module()))


class TestExportLoad:
    """Tests for versioned export documents."""

    def test_module(self):
        M = edge_module()
        again = load(export(M))
        assert modules_equal(again, M)

    def test_map_in_yaml(self):
        M = edge_module()
        P = CellularModule(Z).attach_cell("*", 0)
        f = ModuleMap(P, M, {"*": M.top("b")})
        again = load(export(f, "yaml"), "yaml")
        assert again.images["*"] == M.top("b")

    def test_group_and_interval(self):
        assert load(export(AbelianGroupNF(1, (2,)))) == AbelianGroupNF(1, (2,))
        I = interval("fwd,bwd,bwd", 2)
        assert load(export(I)) == I

    def test_export_is_deterministic(self):
        assert export(edge_module()) == export(edge_module())

    def test_unknown_kind(self):
        with pytest.raises(SchemaError):
            load(b'{"version": "1.0", "kind": "sheaf"}')

    def test_unexportable(self):
        with pytest.raises(WorkbenchError):
            export(object())

    def test_unknown_format(self):
        with pytest.raises(WorkbenchError):
            export(edge_module(), "toml")


class TestReports:
    """Tests for writing reports."""

    @pytest.fixture
    def report(self):
        return Report("demo", [StepOutcome("s", "cylinder", {"cells": 5}, seconds=0.25)], seconds=0.5)

    def test_write_json(self, report, tmp_path):
        path = write_report(report, tmp_path / "out" / "demo.json")
        data = json.loads(path.read_text())
        assert data["ok"] is True
        assert data["steps"][0]["result"] == {"cells": 5}

    def test_write_yaml(self, report, tmp_path):
        path = write_report(report, tmp_path / "demo.yaml", timings=False)
        data = yaml.safe_load(path.read_text())
        assert data["scenario"] == "demo"
        assert "seconds" not in data

    def test_missing_result(self, report):
        with pytest.raises(UnresolvedReferenceError):
            report.result("other")


class TestK0Summary:
    """Tests for the K_0 summaries used by the k0 step and command."""

    def test_colored_sets_relative(self):
        result = k0_summary("colored-sets", 1, "equal-AC", relative=True)
        assert result["group"] == {"rank": 2, "torsion": []}
        assert result["relative"]["G"] == {"rank": 0, "torsion": []}
        assert result["relative"]["G_split"] == {"rank": 1, "torsion": []}
        assert result["strict_cofinality"]["holds"] is False

    def test_description(self):
        result = k0_summary(description={"name": "two", "objects": ["0", "a"], "zero": "0"})
        assert result["group"] == {"rank": 1, "torsion": []}

    def test_needs_a_category(self):
        with pytest.raises(WorkbenchError):
            k0_summary()
