"""Scenario runner, schema checks, export/load and reports.

A scenario is a JSON or YAML document with named inputs and a pipeline of
steps::

    version: "1.0"
    name: pushout-control
    ring: {kind: Z}
    space: {kind: metric, dim: 1}
    modules:
      A: {cells: [{name: a, dim: 0, label: ["0"]}]}
    maps:
      f: {source: A, target: C, images: [[a, [[1, c, []]]]]}
    steps:
      - {op: pushout, name: P, inclusion: i, map: f}
      - {op: assert, path: P.cells, equals: 3}

Elements are lists of ``[coefficient, cell, degeneracy word]`` terms, the
word being strictly decreasing indices.  Steps run in order; each step may
refer to modules and maps registered by earlier steps.
"""

import hashlib
import json
import time
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Hashable, Iterable, Mapping, Optional, Union

import yaml
from filelock import FileLock, Timeout

from .constants import JSON_INDENT, LOCK_TIMEOUT_SECONDS, REPORT_VERSION, SCHEMA_VERSION, SUB_EQUAL_AC
from .control import (
    Ball,
    BallUnion,
    Condition,
    ControlSpace,
    MetricSpace,
    as_point,
    check_map,
    check_module,
    format_rational,
    minimal_certificate,
    minimal_module_condition,
    parse_rational,
    pushout_control,
    space_from_json,
)
from .exceptions import (
    AssertionFailure,
    ControlledModulesError,
    HomotopyError,
    SchemaError,
    SquareError,
    UnresolvedReferenceError,
    WorkbenchError,
)
from .homotopy import (
    cylinder_retraction,
    isomorphism_witness,
    kan_fill_elements,
    lift_element,
    mapping_cylinder,
    require_equal,
)
from .k0 import (
    AbelianGroupNF,
    FinWaldhausenDesc,
    builtin_category,
    from_json as category_from_json,
    generate_colored_sets,
    generate_zakharevich,
    k0,
    k0_split,
    relative_groups,
    stability_report,
    strict_cofinality,
)
from .logging_config import get_logger, log_context
from .modules import CellularModule, Element, ModuleMap, identity_map, pushout, quotient
from .rings import Ring, ring_from_json
from .simplicial import DegeneracyWord
from .telescope import (
    Interval,
    concat_intervals,
    interval,
    mapping_cylinder_long,
    reverse_interval,
    shift_homotopy,
    split_idempotent,
    telescope,
)

logger = get_logger("workbench")

Diagnostics = list[tuple[str, str]]

FORMATS = ("json", "yaml")
TOP_KEYS = ("version", "name", "description", "ring", "space", "modules", "maps", "steps")
PROVENANCE = ("published", "trivial", "derived")

REQUIRED: dict[str, tuple[str, ...]] = {
    "check-control": ("subject",),
    "pushout": ("inclusion", "map"),
    "cylinder": ("map",),
    "mapping-cylinder": ("map", "interval"),
    "telescope": ("map",),
    "split-idempotent": ("map",),
    "fill-horn": ("module", "dim", "missing", "faces"),
    "lift": ("module", "sub", "dim", "missing", "faces", "target"),
    "interval-calc": ("interval",),
    "verify-equivalence": ("forward", "inverse"),
    "k0": (),
    "export": ("ref",),
    "load": ("path",),
    "assert": ("path",),
}
OPS = tuple(REQUIRED)


# ---------------------------------------------------------------------------
# Plain data
# ---------------------------------------------------------------------------


def plain(value: Any) -> Any:
    """JSON-ready form: tuples become lists, rationals "p/q", enums their value."""
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return value
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, float):
        return format_rational(Fraction(value))
    if isinstance(value, Mapping):
        return {str(k): plain(v) for k, v in value.items()}
    if isinstance(value, (set, frozenset)):
        return sorted((plain(v) for v in value), key=repr)
    if isinstance(value, (list, tuple)):
        return [plain(v) for v in value]
    return str(value)


def freeze(value: Any) -> Hashable:
    """Lists become tuples so they can name cells."""
    if isinstance(value, list):
        return tuple(freeze(v) for v in value)
    return value


def pointer(*parts: Any) -> str:
    """JSON pointer with ~ and / escaped."""
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in parts)


def _input_error(where: str, message: str) -> SchemaError:
    return SchemaError([(where, message)])


# ---------------------------------------------------------------------------
# Codec for elements, modules and maps
# ---------------------------------------------------------------------------


def encode_element(x: Element) -> list:
    return [
        [plain(c), plain(e), list(DegeneracyWord.from_surjection(s).indices)]
        for (e, s), c in x.sorted_terms()
    ]


def decode_element(M: CellularModule, data: Any, degree: int, where: str = "") -> Element:
    """Element of M from its term list.

    Raises:
        SchemaError: on unknown cells, bad words or a degree mismatch
    """
    if not isinstance(data, list):
        raise _input_error(where, "element must be a list of terms")
    ring = M.ring
    pieces = []
    for k, term in enumerate(data):
        at = f"{where}/{k}"
        if not isinstance(term, list) or len(term) != 3:
            raise _input_error(at, "term must be [coefficient, cell, word]")
        coef, cell, word = term
        cell = freeze(cell)
        if cell not in M.cells:
            raise _input_error(at, f"unknown cell {cell!r}")
        try:
            surj = DegeneracyWord(tuple(word), M.dim(cell)).to_surjection()
        except (ControlledModulesError, TypeError) as err:
            raise _input_error(at, f"bad degeneracy word {word!r}: {err}") from err
        if len(surj) - 1 != degree:
            raise _input_error(at, f"term has degree {len(surj) - 1}, expected {degree}")
        value = ring.normalize(tuple(coef) if isinstance(coef, list) else coef)
        pieces.append((value, M.basis_element(cell, surj)))
    return M.linear(degree, pieces)


def encode_module(M: CellularModule) -> dict:
    data = M.to_dict(encode=plain)
    for cell in data["cells"]:
        cell["label"] = plain(cell["label"])
        cell["attach"] = plain(cell["attach"])
    return data


def decode_module(data: Mapping[str, Any], ring: Optional[Ring] = None, where: str = "") -> CellularModule:
    """Module from its cell list; cells are attached in the given order.

    Raises:
        SchemaError: if a cell cannot be attached
    """
    if "ring" in data:
        ring = ring_from_json(data["ring"])
    if ring is None:
        raise _input_error(where, "module has no ring")
    M = CellularModule(ring)
    for k, cell in enumerate(data.get("cells", [])):
        at = f"{where}/cells/{k}"
        dim = cell["dim"]
        attach = tuple(
            decode_element(M, a, dim - 1, f"{at}/attach/{j}") for j, a in enumerate(cell.get("attach", []))
        )
        try:
            M = M.attach_cell(freeze(cell["name"]), dim, attach, freeze(cell.get("label")))
        except ControlledModulesError as err:
            raise _input_error(at, str(err)) from err
    return M


def encode_map(f: ModuleMap) -> list:
    return [[plain(e), encode_element(f.images[e])] for e in f.source.cells]


def decode_map(source: CellularModule, target: CellularModule, images: Any, where: str = "") -> ModuleMap:
    """Map from [cell, element] pairs, checked to commute with faces.

    Raises:
        SchemaError: if a source cell has no image
        WellDefinednessError: if the map does not commute with faces
    """
    given = {}
    for k, pair in enumerate(images):
        cell = freeze(pair[0])
        if cell not in source.cells:
            raise _input_error(f"{where}/{k}", f"unknown source cell {cell!r}")
        given[cell] = decode_element(target, pair[1], source.dim(cell), f"{where}/{k}/1")
    missing = [e for e in source.cells if e not in given]
    if missing:
        raise _input_error(where, f"no image for cell {missing[0]!r}")
    return ModuleMap(source, target, given, check=True)


# ---------------------------------------------------------------------------
# Schema
# ---------------------------------------------------------------------------


def _is_name(value: Any) -> bool:
    return isinstance(value, (str, int, list)) and not isinstance(value, bool)


def _check_element(data: Any, where: str, report: Callable[[str, str], None]) -> None:
    if not isinstance(data, list):
        report(where, "element must be a list of terms")
        return
    for k, term in enumerate(data):
        at = f"{where}/{k}"
        if not isinstance(term, list) or len(term) != 3:
            report(at, "term must be [coefficient, cell, word]")
        elif not isinstance(term[2], list) or not all(isinstance(i, int) for i in term[2]):
            report(f"{at}/2", "degeneracy word must be a list of integers")


def _check_module(data: Any, where: str, report: Callable[[str, str], None]) -> None:
    if not isinstance(data, dict):
        report(where, "module must be a mapping")
        return
    cells = data.get("cells")
    if not isinstance(cells, list):
        report(f"{where}/cells", "missing required list 'cells'")
        return
    for k, cell in enumerate(cells):
        at = f"{where}/cells/{k}"
        if not isinstance(cell, dict):
            report(at, "cell must be a mapping")
            continue
        absent = [key for key in ("name", "dim") if key not in cell]
        for key in absent:
            report(at, f"missing required key '{key}'")
        if "name" in cell and not _is_name(cell["name"]):
            report(f"{at}/name", "cell name must be a string, integer or list")
        if absent:
            continue
        dim = cell["dim"]
        if not isinstance(dim, int) or isinstance(dim, bool) or dim < 0:
            report(f"{at}/dim", "dim must be a non-negative integer")
            continue
        attach = cell.get("attach", [])
        if not isinstance(attach, list):
            report(f"{at}/attach", "attach must be a list of elements")
            continue
        expected = dim + 1 if dim > 0 else 0
        if len(attach) != expected:
            report(f"{at}/attach", f"a {dim}-cell needs {expected} attaching elements, got {len(attach)}")
        for j, a in enumerate(attach):
            _check_element(a, f"{at}/attach/{j}", report)


def _check_map(data: Any, where: str, report: Callable[[str, str], None]) -> None:
    if not isinstance(data, dict):
        report(where, "map must be a mapping")
        return
    for key in ("source", "target"):
        if not isinstance(data.get(key), str):
            report(where if key not in data else f"{where}/{key}", f"missing or invalid module name '{key}'")
    images = data.get("images")
    if not isinstance(images, list):
        report(f"{where}/images", "missing required list 'images'")
        return
    for k, pair in enumerate(images):
        at = f"{where}/images/{k}"
        if not isinstance(pair, list) or len(pair) != 2:
            report(at, "image entries must be [cell, element]")
        else:
            _check_element(pair[1], f"{at}/1", report)


def _check_step(step: Any, where: str, seen: set, report: Callable[[str, str], None]) -> None:
    if not isinstance(step, dict):
        report(where, "step must be a mapping")
        return
    op = step.get("op")
    if op not in REQUIRED:
        report(f"{where}/op" if "op" in step else where, f"unknown or missing op {op!r}")
        return
    for key in REQUIRED[op]:
        if key not in step:
            report(where, f"missing required key '{key}' for op '{op}'")
    name = step.get("name")
    if name is not None:
        if not isinstance(name, str):
            report(f"{where}/name", "step name must be a string")
        elif name in seen:
            report(f"{where}/name", f"duplicate step name {name!r}")
        else:
            seen.add(name)
    if step.get("provenance", "derived") not in PROVENANCE:
        report(f"{where}/provenance", f"provenance must be one of {', '.join(PROVENANCE)}")
    if op == "k0" and "description" not in step and "category" not in step:
        report(where, "k0 needs 'category' or 'description'")
    if op == "assert" and not any(key in step for key in ("equals", "holds")):
        report(where, "assert needs 'equals' or 'holds'")


def validate(doc: Any) -> Diagnostics:
    """Every schema violation of a scenario document as (JSON pointer, message)."""
    diagnostics: Diagnostics = []

    def report(where: str, message: str) -> None:
        diagnostics.append((where, message))

    if not isinstance(doc, dict):
        return [("", "document must be a mapping")]
    for key in doc:
        if key not in TOP_KEYS:
            report(pointer(key), "unknown top-level key")
    if str(doc.get("version", SCHEMA_VERSION)) != SCHEMA_VERSION:
        report("/version", f"unsupported version {doc['version']!r}; expected {SCHEMA_VERSION!r}")
    if "ring" in doc and (not isinstance(doc["ring"], dict) or doc["ring"].get("kind") not in ("Z", "Zmod", "group")):
        report("/ring", "ring must be a mapping with kind Z, Zmod or group")
    if "space" in doc and (not isinstance(doc["space"], dict) or doc["space"].get("kind", "metric") not in ("metric", "finite")):
        report("/space", "space must be a mapping with kind metric or finite")
    for section, check in (("modules", _check_module), ("maps", _check_map)):
        entries = doc.get(section, {})
        if not isinstance(entries, dict):
            report(pointer(section), f"'{section}' must be a mapping of names")
            continue
        for name, data in entries.items():
            check(data, pointer(section, name), report)
    steps = doc.get("steps", [])
    if not isinstance(steps, list):
        report("/steps", "'steps' must be a list")
    else:
        seen: set = set()
        for k, step in enumerate(steps):
            _check_step(step, pointer("steps", k), seen, report)
    return diagnostics


# ---------------------------------------------------------------------------
# Reading documents
# ---------------------------------------------------------------------------


def _format_of(path: Path) -> str:
    return "yaml" if path.suffix.lower() in (".yaml", ".yml") else "json"


def parse_text(text: str, fmt: str = "json") -> Any:
    """Parse JSON or YAML text.

    Raises:
        SchemaError: with the line of the syntax error
    """
    try:
        if fmt == "yaml":
            return yaml.safe_load(text)
        return json.loads(text)
    except json.JSONDecodeError as err:
        raise _input_error("", f"malformed JSON at line {err.lineno}, column {err.colno}: {err.msg}") from err
    except yaml.YAMLError as err:
        mark = getattr(err, "problem_mark", None)
        where = f" at line {mark.line + 1}" if mark is not None else ""
        raise _input_error("", f"malformed YAML{where}: {err}") from err


def read_document(path: Union[str, Path]) -> Any:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as err:
        raise _input_error("", f"cannot read {path}: {err}") from err
    return parse_text(text, _format_of(path))


# ---------------------------------------------------------------------------
# Export and load
# ---------------------------------------------------------------------------


def export_document(obj: Any) -> dict:
    """Versioned plain-data document for a module, map, category, group,
    interval, control space, report or step result."""
    doc: dict[str, Any] = {"version": SCHEMA_VERSION}
    if isinstance(obj, CellularModule):
        doc.update(kind="module", module=encode_module(obj))
    elif isinstance(obj, ModuleMap):
        doc.update(kind="map", source=encode_module(obj.source), target=encode_module(obj.target), images=encode_map(obj))
    elif isinstance(obj, FinWaldhausenDesc):
        doc.update(kind="category", category=plain(obj.to_json()))
    elif isinstance(obj, AbelianGroupNF):
        doc.update(kind="group", group=obj.to_json())
    elif isinstance(obj, Interval):
        doc.update(kind="interval", interval={"word": [d.value for d in obj.word], "base": obj.base})
    elif isinstance(obj, ControlSpace):
        doc.update(kind="space", space=plain(obj.to_json()))
    elif isinstance(obj, Report):
        doc.update(kind="report", report=obj.to_json())
    elif isinstance(obj, Mapping):
        doc.update(kind="result", result=plain(obj))
    else:
        raise WorkbenchError(f"cannot export {type(obj).__name__}")
    return plain(doc)


def dump_document(doc: Any, fmt: str = "json") -> bytes:
    """Byte-deterministic rendering with sorted keys."""
    if fmt not in FORMATS:
        raise WorkbenchError(f"unknown format {fmt!r}; expected one of {', '.join(FORMATS)}")
    data = plain(doc)
    if fmt == "yaml":
        return yaml.safe_dump(data, sort_keys=True, allow_unicode=True, default_flow_style=False).encode("utf-8")
    return (json.dumps(data, sort_keys=True, indent=JSON_INDENT, ensure_ascii=False) + "\n").encode("utf-8")


def export(obj: Any, fmt: str = "json") -> bytes:
    return dump_document(export_document(obj), fmt)


def load_document(doc: Mapping[str, Any]) -> Any:
    """Inverse of ``export_document``.

    Raises:
        SchemaError: on an unknown kind or malformed payload
    """
    if not isinstance(doc, Mapping) or "kind" not in doc:
        raise _input_error("", "exported documents carry a 'kind'")
    kind = doc["kind"]
    try:
        if kind == "module":
            return decode_module(doc["module"], where="/module")
        if kind == "map":
            source = decode_module(doc["source"], where="/source")
            target = decode_module(doc["target"], where="/target")
            return decode_map(source, target, doc["images"], "/images")
        if kind == "category":
            return category_from_json(doc["category"])
        if kind == "group":
            return AbelianGroupNF.from_json(doc["group"])
        if kind == "interval":
            data = doc["interval"]
            return interval(",".join(data["word"]), int(data.get("base", 0)))
        if kind == "space":
            return space_from_json(doc["space"])
        if kind in ("report", "result"):
            return doc[kind]
    except KeyError as err:
        raise _input_error("", f"{kind} document is missing {err}") from err
    raise _input_error("/kind", f"unknown kind {kind!r}")


def load(source: Union[str, Path, bytes], fmt: Optional[str] = None) -> Any:
    """Load an exported document from a path or from bytes."""
    if isinstance(source, bytes):
        return load_document(parse_text(source.decode("utf-8"), fmt or "json"))
    path = Path(source)
    if fmt is None:
        return load_document(read_document(path))
    return load_document(parse_text(path.read_text(encoding="utf-8"), fmt))


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class StepOutcome:
    name: str
    op: str
    result: dict
    provenance: str = "derived"
    status: str = "ok"
    seconds: float = 0.0

    def to_json(self, timings: bool = True) -> dict:
        data = {
            "name": self.name,
            "op": self.op,
            "status": self.status,
            "provenance": self.provenance,
            "result": plain(self.result),
        }
        if timings:
            data["seconds"] = round(self.seconds, 6)
        return data


@dataclass
class Report:
    """Outcome of a scenario run, one entry per step."""

    scenario: str
    steps: list[StepOutcome] = field(default_factory=list)
    version: str = REPORT_VERSION
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return all(s.status == "ok" for s in self.steps)

    def result(self, name: str) -> dict:
        for s in self.steps:
            if s.name == name:
                return s.result
        raise UnresolvedReferenceError(name)

    def to_json(self, timings: bool = True) -> dict:
        data: dict[str, Any] = {
            "scenario": self.scenario,
            "version": self.version,
            "ok": self.ok,
            "steps": [s.to_json(timings) for s in self.steps],
        }
        if timings:
            data["seconds"] = round(self.seconds, 6)
        return data

    def dumps(self, fmt: str = "json", timings: bool = True) -> bytes:
        return dump_document(self.to_json(timings), fmt)


def write_report(report: Report, path: Union[str, Path], fmt: Optional[str] = None, timings: bool = True) -> Path:
    """Write the report under a file lock.

    Raises:
        WorkbenchError: if the lock cannot be acquired in time
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lock_file = path.with_name(path.name + ".lock")
    lock = FileLock(str(lock_file), timeout=LOCK_TIMEOUT_SECONDS)
    try:
        with lock:
            logger.debug("Acquired lock: %s", lock_file)
            path.write_bytes(report.dumps(fmt or _format_of(path), timings))
    except Timeout:
        logger.error("Failed to acquire lock: %s", lock_file)
        raise WorkbenchError(f"Could not acquire lock for report (timeout: {LOCK_TIMEOUT_SECONDS}s): {path}")
    logger.info("report written: %s", path)
    return path


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------


@dataclass
class Scenario:
    name: str
    document: dict
    base_dir: Path = field(default_factory=Path.cwd)

    @property
    def steps(self) -> list[dict]:
        return list(self.document.get("steps", []))


def parse_scenario(source: Union[str, Path, Mapping[str, Any]], base_dir: Optional[Path] = None) -> Scenario:
    """Read and validate a scenario.

    Raises:
        SchemaError: listing every violation
    """
    if isinstance(source, Mapping):
        doc, where = dict(source), base_dir or Path.cwd()
        name = str(doc.get("name", "scenario"))
    else:
        path = Path(source)
        doc, where = read_document(path), base_dir or path.parent
        name = str(doc.get("name", path.stem)) if isinstance(doc, dict) else path.stem
    diagnostics = validate(doc if doc is not None else {})
    if diagnostics:
        error = SchemaError(diagnostics, str(source) if not isinstance(source, Mapping) else "")
        logger.error("%s", error)
        raise error
    return Scenario(name, doc or {}, where)


def _lookup_path(results: Mapping[str, Any], path: str) -> Any:
    head, _, rest = path.partition(".")
    if head not in results:
        raise UnresolvedReferenceError(head)
    value: Any = results[head]
    for key in rest.split(".") if rest else []:
        if isinstance(value, Mapping) and key in value:
            value = value[key]
        elif isinstance(value, list) and key.isdigit() and int(key) < len(value):
            value = value[int(key)]
        else:
            raise UnresolvedReferenceError(path)
    return value


class ScenarioRunner:
    """Executes steps against named modules, maps and earlier results."""

    def __init__(self, scenario: Scenario):
        self.scenario = scenario
        doc = scenario.document
        self.ring: Ring = ring_from_json(doc.get("ring", {"kind": "Z"}))
        self.space: Optional[ControlSpace] = space_from_json(doc["space"]) if "space" in doc else None
        self.modules: dict[str, CellularModule] = {}
        self.maps: dict[str, ModuleMap] = {}
        self.objects: dict[str, Any] = {}
        self.results: dict[str, dict] = {}
        for name, data in doc.get("modules", {}).items():
            self.modules[name] = decode_module(data, self.ring, pointer("modules", name))
        for name, data in doc.get("maps", {}).items():
            self.maps[name] = decode_map(
                self.module(data["source"]), self.module(data["target"]), data["images"], pointer("maps", name, "images")
            )
        self.handlers: dict[str, Callable[[str, dict], dict]] = {
            "check-control": self.check_control,
            "pushout": self.pushout,
            "cylinder": self.cylinder,
            "mapping-cylinder": self.mapping_cylinder,
            "telescope": self.telescope,
            "split-idempotent": self.split_idempotent,
            "fill-horn": self.fill_horn,
            "lift": self.lift,
            "interval-calc": self.interval_calc,
            "verify-equivalence": self.verify_equivalence,
            "k0": self.k0,
            "export": self.export,
            "load": self.load,
            "assert": self.check_assertion,
        }

    # -- references --------------------------------------------------------

    def module(self, name: str) -> CellularModule:
        if name not in self.modules:
            raise UnresolvedReferenceError(name)
        return self.modules[name]

    def map(self, name: str) -> ModuleMap:
        if name not in self.maps:
            raise UnresolvedReferenceError(name)
        return self.maps[name]

    def condition(self, data: Any) -> Condition:
        if self.space is None:
            raise WorkbenchError("this step needs a control space")
        return self.space.condition_from_json(data)

    def support(self, data: Any) -> Any:
        """Metric supports are lists of {center, radius} balls; finite ones a name or point list."""
        if data is None:
            return None
        if isinstance(self.space, MetricSpace):
            return BallUnion(tuple(Ball(as_point(b["center"]), parse_rational(b["radius"])) for b in data))
        return data if isinstance(data, str) else frozenset(freeze(p) for p in data)

    def _register(self, name: str, module: CellularModule, maps: Mapping[str, ModuleMap]) -> None:
        self.modules[name] = module
        for suffix, m in maps.items():
            self.maps[f"{name}.{suffix}"] = m

    # -- running -----------------------------------------------------------

    def run(self) -> Report:
        report = Report(self.scenario.name)
        started = time.perf_counter()
        with log_context(scenario=self.scenario.name):
            for k, step in enumerate(self.scenario.steps):
                outcome = self.run_step(step, k)
                report.steps.append(outcome)
            report.seconds = time.perf_counter() - started
            logger.info("%d steps ok", len(report.steps))
        return report

    def run_step(self, step: Mapping[str, Any], index: int = 0) -> StepOutcome:
        op = step["op"]
        name = step.get("name") or f"step{index}"
        started = time.perf_counter()
        with log_context(step=name):
            logger.info("running %s", op)
            try:
                result = self.handlers[op](name, dict(step))
            except ControlledModulesError as err:
                logger.error("%s failed: %s", op, err)
                raise
        self.results[name] = result
        return StepOutcome(name, op, result, step.get("provenance", "derived"), "ok", time.perf_counter() - started)

    # -- handlers ----------------------------------------------------------

    def check_control(self, name: str, step: dict) -> dict:
        subject = step["subject"]
        if self.space is None:
            raise WorkbenchError("check-control needs a control space")
        if subject in self.modules:
            M = self.modules[subject]
            minimal = minimal_module_condition(M, self.space)
            condition = self.condition(step["condition"]) if "condition" in step else minimal
            cert = check_module(M, self.space, condition, self.support(step.get("support")))
        else:
            f = self.map(subject)
            minimal = minimal_certificate(f, self.space)
            condition = self.condition(step["condition"]) if "condition" in step else minimal
            cert = check_map(f, self.space, condition)
        return {"subject": subject, "kind": cert.kind, "condition": condition.to_json(), "minimal": minimal.to_json()}

    def pushout(self, name: str, step: dict) -> dict:
        i, f = self.map(step["inclusion"]), self.map(step["map"])
        po = pushout(i, f)
        self._register(name, po.D, {"leg_B": po.leg_B, "leg_C": po.leg_C})
        result: dict[str, Any] = {"cells": len(po.D), "new_cells": len(po.names)}
        conditions = step.get("conditions")
        if conditions is not None:
            induced = None
            if "induced" in step:
                spec = step["induced"]
                g = po.induced(self.map(spec["g_C"]), self.map(spec["g_B"]))
                self.maps[f"{name}.induced"] = g
                induced = (g, self.condition(spec["condition"]))
            certs = pushout_control(
                po, self.space, self.condition(conditions["E_B"]), self.condition(conditions["E_C"]),
                self.condition(conditions["E_f"]), induced,
            )
            result["certificates"] = {key: cert.to_json() for key, cert in certs.items()}
        return result

    def cylinder(self, name: str, step: dict) -> dict:
        f = self.map(step["map"])
        Tf = mapping_cylinder(f)
        Tf.check_axioms()
        cylinder_retraction(f, Tf)
        self._register(name, Tf.module, {"front": Tf.front, "back": Tf.back, "projection": Tf.projection})
        return {"cells": len(Tf.module), "axioms": True, "deformation_retract": True}

    def mapping_cylinder(self, name: str, step: dict) -> dict:
        f = self.map(step["map"])
        I = interval(step["interval"])
        cyl = mapping_cylinder_long(f, I)
        require_equal("p . front = f", cyl.projection.compose(cyl.front), f)
        require_equal("p . back = id", cyl.projection.compose(cyl.back), identity_map(f.target))
        self._register(name, cyl.module, {"front": cyl.front, "back": cyl.back, "projection": cyl.projection})
        return {"interval": str(I), "cells": len(cyl.module)}

    def telescope(self, name: str, step: dict) -> dict:
        f = self.map(step["map"])
        tel = telescope(f, interval(step.get("interval", "fwd")), step.get("stages"))
        self.objects[name] = tel
        self._register(name, tel.module, {"front": tel.front_inclusion})
        result = {"interval": str(tel.interval), "stages": tel.N, "cells": len(tel.module)}
        if step.get("shift"):
            shift_homotopy(tel)
            result["shift_homotopy"] = True
        return result

    def split_idempotent(self, name: str, step: dict) -> dict:
        split = split_idempotent(self.map(step["map"]), step.get("stages"))
        self.objects[name] = split
        eq = split.equivalence
        self._register(name, split.wedge.module, {"forward": eq.forward, "inverse": eq.inverse})
        return {
            "stages": split.truncation,
            "summand_cells": len(split.telescope.module),
            "complement_cells": len(split.complement.module),
            "verified": True,
        }

    def _faces(self, P: CellularModule, step: dict) -> tuple[int, int, dict[int, Element]]:
        m, j = int(step["dim"]), int(step["missing"])
        faces = {int(i): decode_element(P, v, m - 1, f"/faces/{i}") for i, v in step["faces"].items()}
        expected = set(range(m + 1)) - {j}
        if set(faces) != expected:
            raise _input_error("/faces", f"faces must be given for indices {sorted(expected)}")
        return m, j, faces

    @staticmethod
    def _check_faces(P: CellularModule, w: Element, faces: Mapping[int, Element]) -> None:
        for i, y in faces.items():
            if P.face(w, i) != y:
                raise HomotopyError(f"filler has the wrong face {i}")

    def fill_horn(self, name: str, step: dict) -> dict:
        P = self.module(step["module"])
        m, j, faces = self._faces(P, step)
        w = kan_fill_elements(P, m, j, faces, check=True)
        self._check_faces(P, w, faces)
        return {"filler": encode_element(w)}

    def lift(self, name: str, step: dict) -> dict:
        P = self.module(step["module"])
        q = quotient(P, [freeze(c) for c in step["sub"]])
        m, j, faces = self._faces(P, step)
        target = decode_element(q.module, step["target"], m, "/target")
        for i, y in faces.items():
            if q.projection(y) != q.module.face(target, i):
                raise SquareError(i)
        w = lift_element(q, m, j, faces, target)
        self._check_faces(P, w, faces)
        if q.projection(w) != target:
            raise SquareError("lift")
        return {"lift": encode_element(w)}

    def interval_calc(self, name: str, step: dict) -> dict:
        I = interval(step["interval"], int(step.get("base", 0)))
        if "concat" in step:
            I = concat_intervals(I, interval(step["concat"]))
        if step.get("reverse"):
            I = reverse_interval(I)
        self.objects[name] = I
        return {"interval": str(I), "length": len(I), "base": I.base, "end": I.end, "ordered": I.is_ordered}

    def verify_equivalence(self, name: str, step: dict) -> dict:
        f, g = self.map(step["forward"]), self.map(step["inverse"])
        isomorphism_witness(f, g)
        return {"kind": "isomorphism", "verified": True}

    def k0(self, name: str, step: dict) -> dict:
        return k0_summary(
            category=step.get("category"),
            size=int(step.get("size", 1)),
            sub=step.get("sub"),
            description=step.get("description"),
            relative=bool(step.get("relative", False)),
            sizes=step.get("stability"),
        )

    def _resolve(self, ref: str) -> Any:
        for table in (self.modules, self.maps, self.objects, self.results):
            if ref in table:
                return table[ref]
        raise UnresolvedReferenceError(ref)

    def export(self, name: str, step: dict) -> dict:
        obj = self._resolve(step["ref"])
        fmt = step.get("format", "json")
        data = export(obj, fmt)
        return {"ref": step["ref"], "format": fmt, "bytes": len(data), "sha256": hashlib.sha256(data).hexdigest()}

    def load(self, name: str, step: dict) -> dict:
        path = self.scenario.base_dir / step["path"]
        obj = load(path)
        if isinstance(obj, CellularModule):
            self.modules[name] = obj
        elif isinstance(obj, ModuleMap):
            self.maps[name] = obj
            self.modules[f"{name}.source"] = obj.source
            self.modules[f"{name}.target"] = obj.target
        else:
            self.objects[name] = obj
        return {"path": step["path"], "kind": type(obj).__name__}

    def check_assertion(self, name: str, step: dict) -> dict:
        value = plain(_lookup_path(self.results, step["path"]))
        if "equals" in step and value != plain(step["equals"]):
            raise AssertionFailure(name, f"{step['path']} is {value!r}, expected {step['equals']!r}")
        if "holds" in step and bool(value) != bool(step["holds"]):
            raise AssertionFailure(name, f"{step['path']} is {value!r}, expected truth value {step['holds']!r}")
        return {"path": step["path"], "value": value}


def k0_summary(
    category: Optional[str] = None,
    size: int = 1,
    sub: Optional[str] = None,
    description: Optional[Mapping[str, Any]] = None,
    relative: bool = False,
    sizes: Optional[Iterable[int]] = None,
) -> dict:
    """K_0 and K_0' of a built-in or supplied category, optionally with the
    relative groups of the built-in pair and a stability report."""
    if description is not None:
        desc = category_from_json(description)
        return {"category": desc.name, "group": k0(desc).to_json(), "split_group": k0_split(desc).to_json()}
    if category is None:
        raise WorkbenchError("k0 needs a category or a description")
    desc = builtin_category(category, size, sub)
    result: dict[str, Any] = {
        "category": desc.name,
        "size": size,
        "group": k0(desc).to_json(),
        "split_group": k0_split(desc).to_json(),
    }
    if relative:
        if sub == SUB_EQUAL_AC:
            inner, outer = generate_colored_sets(size, SUB_EQUAL_AC), generate_colored_sets(size)
        else:
            inner, outer = generate_zakharevich(size)
        rel = relative_groups(inner, outer)
        result["relative"] = rel.to_json()
        result["strict_cofinality"] = strict_cofinality(inner, outer).to_json()
    if sizes is not None:
        result["stability"] = stability_report(category, sizes, sub).to_json()
    return result


def run_scenario(source: Union[str, Path, Mapping[str, Any]], out: Optional[Union[str, Path]] = None) -> Report:
    """Validate and run a scenario, optionally writing the report.

    Raises:
        SchemaError: if the document does not validate
        UnresolvedReferenceError: if a step names an unknown input
        AssertionFailure: if an assertion step fails
        ControlledModulesError: for the failing contract of any other step
    """
    scenario = parse_scenario(source)
    report = ScenarioRunner(scenario).run()
    if out is not None:
        write_report(report, out)
    return report
