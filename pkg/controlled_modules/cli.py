#!/usr/bin/env python3
"""CLI interface for the controlled-modules workbench."""

import argparse
import sys
from pathlib import Path
from typing import Any, Callable, Optional

from .config import get_config
from .constants import CATEGORY_COLORED_SETS, SUPPORTED_CATEGORIES, ExitCode
from .control import check_module, minimal_module_condition
from .exceptions import (
    ConfigError,
    ControlledModulesError,
    SchemaError,
    UnresolvedReferenceError,
)
from .logging_config import get_logger, setup_logging
from .workbench import (
    FORMATS,
    ScenarioRunner,
    dump_document,
    export,
    export_document,
    k0_summary,
    load,
    parse_scenario,
    parse_text,
    read_document,
    run_scenario,
    validate,
)

logger = get_logger("cli")

INPUT_ERRORS = (SchemaError, UnresolvedReferenceError, ConfigError)


def _emit(args: argparse.Namespace, data: Any) -> None:
    """Print a result document, or write it to --out."""
    rendered = dump_document(data, getattr(args, "format", None) or "json")
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_bytes(rendered)
        print(f"Wrote: {args.out}")
    else:
        sys.stdout.write(rendered.decode("utf-8"))


def _json_arg(text: str, what: str) -> Any:
    try:
        return parse_text(text, "json")
    except SchemaError as e:
        raise SchemaError([(f"--{what}", d[1]) for d in e.diagnostics]) from e


def _single_step(args: argparse.Namespace, step: dict) -> None:
    """Run one step against the modules and maps of the input document."""
    runner = ScenarioRunner(parse_scenario(args.input))
    step.setdefault("name", step["op"])
    outcome = runner.run_step(step)
    result = dict(outcome.result)
    module = runner.modules.get(outcome.name)
    if args.emit_certificate and runner.space is not None and module is not None:
        condition = minimal_module_condition(module, runner.space)
        result["certificate"] = check_module(module, runner.space, condition).to_json()
    _emit(args, {"op": outcome.op, "name": outcome.name, "result": result})


def cmd_run(args: argparse.Namespace) -> None:
    """Run a scenario and print or write its report."""
    out = args.out
    if out is None and args.save:
        out = get_config().reports_dir / f"{Path(args.scenario).stem}.report.json"
    report = run_scenario(args.scenario, out)
    if out is not None:
        print(f"Report: {out}")
    else:
        sys.stdout.write(report.dumps(timings=not args.no_timings).decode("utf-8"))


def cmd_validate(args: argparse.Namespace) -> None:
    """Validate a scenario and list every diagnostic."""
    diagnostics = validate(read_document(args.scenario))
    if not diagnostics:
        print(f"{args.scenario}: valid")
        return
    for where, message in diagnostics:
        print(f"{where or '/'}: {message}", file=sys.stderr)
    raise SchemaError(diagnostics, str(args.scenario))


def cmd_k0(args: argparse.Namespace) -> None:
    """Compute K_0 of a built-in or supplied category."""
    description = read_document(args.source) if args.source else None
    sizes = [int(s) for s in args.stability.split(",")] if args.stability else None
    _emit(args, k0_summary(
        category=None if description else args.category,
        size=args.size,
        sub=args.sub,
        description=description,
        relative=args.relative,
        sizes=sizes,
    ))


def cmd_telescope(args: argparse.Namespace) -> None:
    step = {"op": "telescope", "map": args.map, "interval": args.interval, "shift": args.shift}
    if args.stages is not None:
        step["stages"] = args.stages
    _single_step(args, step)


def cmd_split_idempotent(args: argparse.Namespace) -> None:
    step = {"op": "split-idempotent", "map": args.map}
    if args.stages is not None:
        step["stages"] = args.stages
    _single_step(args, step)


def cmd_fill_horn(args: argparse.Namespace) -> None:
    _single_step(args, {
        "op": "fill-horn", "module": args.module, "dim": args.dim,
        "missing": args.missing, "faces": _json_arg(args.faces, "faces"),
    })


def cmd_lift(args: argparse.Namespace) -> None:
    _single_step(args, {
        "op": "lift", "module": args.module, "sub": _json_arg(args.sub, "sub"),
        "dim": args.dim, "missing": args.missing,
        "faces": _json_arg(args.faces, "faces"), "target": _json_arg(args.target, "target"),
    })


def cmd_pushout(args: argparse.Namespace) -> None:
    step: dict = {"op": "pushout", "inclusion": args.inclusion, "map": args.map}
    if args.conditions:
        E_B, E_C, E_f = args.conditions
        step["conditions"] = {"E_B": E_B, "E_C": E_C, "E_f": E_f}
    _single_step(args, step)


def cmd_cylinder(args: argparse.Namespace) -> None:
    _single_step(args, {"op": "cylinder", "map": args.map})


def cmd_mapping_cylinder(args: argparse.Namespace) -> None:
    _single_step(args, {"op": "mapping-cylinder", "map": args.map, "interval": args.interval})


def cmd_check_control(args: argparse.Namespace) -> None:
    step: dict = {"op": "check-control", "subject": args.subject}
    if args.condition is not None:
        step["condition"] = args.condition
    _single_step(args, step)


def cmd_verify_equivalence(args: argparse.Namespace) -> None:
    _single_step(args, {"op": "verify-equivalence", "forward": args.forward, "inverse": args.inverse})


def cmd_interval_calc(args: argparse.Namespace) -> None:
    """Interval bookkeeping; needs no input document."""
    step: dict = {"op": "interval-calc", "name": "interval", "interval": args.interval, "base": args.base}
    if args.concat:
        step["concat"] = args.concat
    if args.reverse:
        step["reverse"] = True
    runner = ScenarioRunner(parse_scenario({"version": "1.0", "name": "interval-calc"}))
    outcome = runner.run_step(step)
    _emit(args, {"op": outcome.op, "name": outcome.name, "result": outcome.result})


def cmd_export(args: argparse.Namespace) -> None:
    """Export a module or map of the input document."""
    runner = ScenarioRunner(parse_scenario(args.input))
    if args.ref in runner.modules:
        obj: Any = runner.modules[args.ref]
    else:
        obj = runner.map(args.ref)
    data = export(obj, args.format)
    if args.out:
        Path(args.out).write_bytes(data)
        print(f"Wrote: {args.out}")
    else:
        sys.stdout.write(data.decode("utf-8"))


def cmd_load(args: argparse.Namespace) -> None:
    """Import an exported document and print it back in canonical form."""
    obj = load(args.path)
    if isinstance(obj, dict):
        _emit(args, obj)
    else:
        _emit(args, export_document(obj))


def exit_code_for(error: Exception) -> ExitCode:
    if isinstance(error, INPUT_ERRORS):
        return ExitCode.INPUT_ERROR
    return ExitCode.CONTRACT_FAILURE


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="controlled-modules",
        description="Controlled cellular simplicial modules: control, homotopy, telescopes and K_0",
    )
    parser.add_argument("--debug", action="store_true", help="Enable debug logging")
    parser.add_argument("--log-file", type=Path, help="Also log to this file")
    parser.add_argument("--out", "-o", type=Path, help="Write the output to this file")
    parser.add_argument(
        "--emit-certificate", action="store_true",
        help="Attach a control certificate for the constructed module",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    # run
    p_run = subparsers.add_parser("run", help="Run a scenario")
    p_run.add_argument("scenario", type=Path, help="Scenario file (JSON or YAML)")
    p_run.add_argument("--save", action="store_true", help="Write the report under the reports directory")
    p_run.add_argument("--no-timings", action="store_true", help="Omit timing fields")

    # validate
    p_validate = subparsers.add_parser("validate", help="Validate a scenario")
    p_validate.add_argument("scenario", type=Path, help="Scenario file (JSON or YAML)")

    # k0
    p_k0 = subparsers.add_parser("k0", help="Compute K_0 of a finite category")
    p_k0.add_argument("--category", "-c", choices=SUPPORTED_CATEGORIES, default=CATEGORY_COLORED_SETS)
    p_k0.add_argument("--size", "-s", type=int, default=1, help="Truncation size")
    p_k0.add_argument("--sub", help="Subcategory (equal-AC, or B for zakharevich)")
    p_k0.add_argument("--from", dest="source", type=Path, help="Category description file")
    p_k0.add_argument("--relative", action="store_true", help="Include the relative groups")
    p_k0.add_argument("--stability", help="Comma separated sizes for a stability report")

    def with_input(name: str, help_text: str) -> argparse.ArgumentParser:
        p = subparsers.add_parser(name, help=help_text)
        p.add_argument("input", type=Path, help="Document with modules, maps and control space")
        return p

    # telescope
    p_tel = with_input("telescope", "Build a mapping telescope")
    p_tel.add_argument("--map", "-m", required=True, help="Self map name")
    p_tel.add_argument("--interval", "-i", default="fwd", help="Interval word, e.g. fwd,bwd")
    p_tel.add_argument("--stages", "-n", type=int, help="Truncation stage")
    p_tel.add_argument("--shift", action="store_true", help="Also build the shift homotopy")

    # split-idempotent
    p_split = with_input("split-idempotent", "Split a strict idempotent")
    p_split.add_argument("--map", "-m", required=True, help="Idempotent name")
    p_split.add_argument("--stages", "-n", type=int, help="Truncation stage")

    # fill-horn
    p_fill = with_input("fill-horn", "Fill a horn in a module")
    p_fill.add_argument("--module", required=True)
    p_fill.add_argument("--dim", type=int, required=True)
    p_fill.add_argument("--missing", type=int, required=True, help="Index of the missing face")
    p_fill.add_argument("--faces", required=True, help="JSON mapping face index -> element")

    # lift
    p_lift = with_input("lift", "Lift a horn against a quotient")
    p_lift.add_argument("--module", required=True)
    p_lift.add_argument("--sub", required=True, help="JSON list of submodule cells")
    p_lift.add_argument("--dim", type=int, required=True)
    p_lift.add_argument("--missing", type=int, required=True)
    p_lift.add_argument("--faces", required=True, help="JSON mapping face index -> element")
    p_lift.add_argument("--target", required=True, help="JSON element of the quotient")

    # pushout
    p_po = with_input("pushout", "Pushout along a cellular inclusion")
    p_po.add_argument("--inclusion", required=True)
    p_po.add_argument("--map", "-m", required=True)
    p_po.add_argument("--conditions", nargs=3, metavar=("E_B", "E_C", "E_f"), help="Control conditions")

    # cylinder
    p_cyl = with_input("cylinder", "Mapping cylinder with its axioms")
    p_cyl.add_argument("--map", "-m", required=True)

    # mapping-cylinder
    p_mcyl = with_input("mapping-cylinder", "Mapping cylinder over an interval")
    p_mcyl.add_argument("--map", "-m", required=True)
    p_mcyl.add_argument("--interval", "-i", default="fwd")

    # check-control
    p_check = with_input("check-control", "Certify a module or map")
    p_check.add_argument("--subject", required=True, help="Module or map name")
    p_check.add_argument("--condition", help="Condition; minimal if omitted")

    # verify-equivalence
    p_eq = with_input("verify-equivalence", "Verify mutually inverse maps")
    p_eq.add_argument("--forward", required=True)
    p_eq.add_argument("--inverse", required=True)

    # interval-calc
    p_int = subparsers.add_parser("interval-calc", help="Interval bookkeeping")
    p_int.add_argument("interval", help="Interval word, e.g. fwd,bwd")
    p_int.add_argument("--base", type=int, default=0)
    p_int.add_argument("--concat", help="Interval word appended at the end")
    p_int.add_argument("--reverse", action="store_true")

    # export
    p_export = with_input("export", "Export a module or map")
    p_export.add_argument("--ref", required=True, help="Module or map name")
    p_export.add_argument("--format", "-f", choices=FORMATS, default="json")

    # load
    p_load = subparsers.add_parser("load", help="Import an exported document")
    p_load.add_argument("path", type=Path)

    return parser


def main(argv: Optional[list[str]] = None) -> None:
    """Main entry point for the CLI."""
    parser = build_parser()
    args = parser.parse_args(argv)
    setup_logging(log_file=args.log_file, debug=args.debug)

    # Dispatch commands
    CommandHandler = Callable[[argparse.Namespace], None]
    commands: dict[str, CommandHandler] = {
        "run": cmd_run,
        "validate": cmd_validate,
        "k0": cmd_k0,
        "telescope": cmd_telescope,
        "split-idempotent": cmd_split_idempotent,
        "fill-horn": cmd_fill_horn,
        "lift": cmd_lift,
        "pushout": cmd_pushout,
        "cylinder": cmd_cylinder,
        "mapping-cylinder": cmd_mapping_cylinder,
        "check-control": cmd_check_control,
        "verify-equivalence": cmd_verify_equivalence,
        "interval-calc": cmd_interval_calc,
        "export": cmd_export,
        "load": cmd_load,
    }

    try:
        commands[args.command](args)
    except ControlledModulesError as e:
        if not isinstance(e, SchemaError) or args.command != "validate":
            print(str(e), file=sys.stderr)
        sys.exit(exit_code_for(e))
    except OSError as e:
        print(str(e), file=sys.stderr)
        sys.exit(ExitCode.INPUT_ERROR)


if __name__ == "__main__":
    main()
