"""Control spaces, control conditions and certificates.

Two kinds of control space are supported:

* :class:`MetricSpace` -- points are rational coordinate vectors, a
  condition is a bound alpha and means ``d(x, y) <= alpha`` (max metric) or
  ``d(x, y)^2 <= alpha^2`` (Euclidean, compared in squares).
* :class:`FiniteSpace` -- an explicit point set with named symmetric,
  reflexive relations and named support sets.

A module is E-controlled when every cell is E-close to every cell of its
cellular closure; a map is E-controlled when every source cell is E-close to
every cell of the closure of its image.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Any, Callable, Hashable, Iterable, Mapping, Optional, Sequence, Union

from .constants import MetricKind, SpaceKind
from .exceptions import CertificateSoundnessError, ControlError, ControlViolation, MixedSpacesError
from .logging_config import get_logger
from .modules import CellularModule, ModuleMap, Pushout

logger = get_logger("control")

Point = tuple[Fraction, ...]


def parse_rational(value: Any) -> Fraction:
    """Parse ints, Fractions and "p/q" strings exactly."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ControlError(f"not a rational: {value!r}")
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise ControlError(f"not a rational: {value!r}")


def format_rational(value: Fraction) -> str:
    """Canonical "p/q" (or "p" for integers) in lowest terms."""
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def as_point(label: Any) -> Point:
    """Coerce a module label into a rational point."""
    if isinstance(label, (list, tuple)):
        return tuple(parse_rational(v) for v in label)
    return (parse_rational(label),)


def sqrt_ceiling(square: Fraction) -> Fraction:
    """Least q-denominator rational >= sqrt(p/q); exact on rational squares."""
    p, q = square.numerator, square.denominator
    root = isqrt(p * q)
    if root * root < p * q:
        root += 1
    return Fraction(root, q)


# ---------------------------------------------------------------------------
# Conditions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MetricCondition:
    """{(x, y) : d(x, y) <= alpha}."""

    alpha: Fraction

    def __post_init__(self) -> None:
        if self.alpha < 0:
            raise ControlError(f"alpha must be >= 0, got {self.alpha}")

    def to_json(self) -> dict:
        return {"alpha": format_rational(self.alpha)}


@dataclass(frozen=True)
class RelationCondition:
    """An explicit symmetric reflexive relation."""

    pairs: frozenset

    def to_json(self) -> dict:
        return {"pairs": sorted([list(p) for p in self.pairs], key=repr)}


Condition = Union[MetricCondition, RelationCondition]


@dataclass(frozen=True)
class Ball:
    center: Point
    radius: Fraction


@dataclass(frozen=True)
class BallUnion:
    """Metric support condition: a finite union of closed balls."""

    balls: tuple[Ball, ...]


class ControlSpace:
    """Common interface of the control spaces."""

    kind: SpaceKind

    def diagonal(self) -> Condition:
        raise NotImplementedError

    def close(self, a: Any, b: Any, condition: Condition) -> bool:
        raise NotImplementedError

    def compose_conditions(self, first: Condition, second: Condition) -> Condition:
        """A condition containing second . first."""
        raise NotImplementedError

    def union_conditions(self, first: Condition, second: Condition) -> Condition:
        raise NotImplementedError

    def contained(self, smaller: Condition, larger: Condition) -> bool:
        raise NotImplementedError

    def minimal_condition(self, pairs: Iterable[tuple[Any, Any]]) -> Condition:
        """Smallest condition containing the given label pairs."""
        raise NotImplementedError

    def thicken(self, points: Iterable[Any], condition: Condition) -> set:
        raise NotImplementedError

    def in_support(self, label: Any, support: Any) -> bool:
        raise NotImplementedError

    def thicken_support(self, support: Any, condition: Condition) -> Any:
        raise NotImplementedError

    def report_distance(self, a: Any, b: Any) -> Any:
        """Distance shown in violation reports."""
        return None

    def to_json(self) -> dict:
        raise NotImplementedError

    def condition_from_json(self, data: Any) -> Condition:
        raise NotImplementedError


class MetricSpace(ControlSpace):
    """Q^dim with the max metric or the Euclidean metric compared in squares."""

    kind = SpaceKind.METRIC

    def __init__(self, dim: int = 1, metric: Union[str, MetricKind] = MetricKind.MAX, points: Optional[Iterable[Any]] = None):
        self.dim = dim
        self.metric = MetricKind(metric)
        self.points: Optional[list[Point]] = [as_point(p) for p in points] if points is not None else None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, MetricSpace) and (self.dim, self.metric, self.points) == (other.dim, other.metric, other.points)

    def __hash__(self) -> int:
        return hash((self.dim, self.metric))

    def __repr__(self) -> str:
        return f"MetricSpace(dim={self.dim}, metric={self.metric})"

    def condition(self, alpha: Any) -> MetricCondition:
        return MetricCondition(parse_rational(alpha))

    def measure(self, a: Any, b: Any) -> Fraction:
        """d(a, b) for max, d(a, b)^2 for euclid2."""
        pa, pb = as_point(a), as_point(b)
        if len(pa) != self.dim or len(pb) != self.dim:
            raise ControlError(f"label dimension mismatch: {a!r}, {b!r} in dimension {self.dim}")
        if self.metric is MetricKind.MAX:
            return max((abs(x - y) for x, y in zip(pa, pb)), default=Fraction(0))
        return sum(((x - y) ** 2 for x, y in zip(pa, pb)), Fraction(0))

    def alpha_for(self, a: Any, b: Any) -> Fraction:
        """Smallest representable alpha with (a, b) inside the condition."""
        value = self.measure(a, b)
        return value if self.metric is MetricKind.MAX else sqrt_ceiling(value)

    def report_distance(self, a: Any, b: Any) -> Fraction:
        return self.alpha_for(a, b)

    def diagonal(self) -> MetricCondition:
        return MetricCondition(Fraction(0))

    def _check(self, *conditions: Condition) -> None:
        for c in conditions:
            if not isinstance(c, MetricCondition):
                raise MixedSpacesError(f"{c!r} is not a metric condition")

    def close(self, a: Any, b: Any, condition: Condition) -> bool:
        self._check(condition)
        value = self.measure(a, b)
        bound = condition.alpha if self.metric is MetricKind.MAX else condition.alpha ** 2
        return value <= bound

    def compose_conditions(self, first: Condition, second: Condition) -> MetricCondition:
        self._check(first, second)
        return MetricCondition(first.alpha + second.alpha)

    def union_conditions(self, first: Condition, second: Condition) -> MetricCondition:
        self._check(first, second)
        return MetricCondition(max(first.alpha, second.alpha))

    def contained(self, smaller: Condition, larger: Condition) -> bool:
        self._check(smaller, larger)
        return smaller.alpha <= larger.alpha

    def minimal_condition(self, pairs: Iterable[tuple[Any, Any]]) -> MetricCondition:
        return MetricCondition(max((self.alpha_for(a, b) for a, b in pairs), default=Fraction(0)))

    def thicken(self, points: Iterable[Any], condition: Condition) -> set:
        """Closed neighborhood of the points, intersected with the stored points."""
        if self.points is None:
            raise ControlError("thickening in a metric space needs stored points")
        centers = [as_point(p) for p in points]
        return {p for p in self.points if any(self.close(p, c, condition) for c in centers)}

    def in_support(self, label: Any, support: BallUnion) -> bool:
        return any(self.close(label, b.center, MetricCondition(b.radius)) for b in support.balls)

    def thicken_support(self, support: BallUnion, condition: Condition) -> BallUnion:
        self._check(condition)
        return BallUnion(tuple(Ball(b.center, b.radius + condition.alpha) for b in support.balls))

    def to_json(self) -> dict:
        data: dict = {"kind": "metric", "dim": self.dim, "metric": self.metric.value}
        if self.points is not None:
            data["points"] = [[format_rational(c) for c in p] for p in self.points]
        return data

    def condition_from_json(self, data: Any) -> MetricCondition:
        if isinstance(data, dict) and "alpha" in data:
            return self.condition(data["alpha"])
        return self.condition(data)


class FiniteSpace(ControlSpace):
    """Finite point set with named relations and supports.

    Relations are closed to symmetric reflexive relations on construction.
    """

    kind = SpaceKind.FINITE

    def __init__(
        self,
        points: Iterable[Hashable],
        relations: Optional[Mapping[str, Iterable[tuple[Hashable, Hashable]]]] = None,
        supports: Optional[Mapping[str, Iterable[Hashable]]] = None,
    ):
        self.points: tuple = tuple(points)
        self._point_set = frozenset(self.points)
        self.relations: dict[str, RelationCondition] = {
            name: self.relation(pairs) for name, pairs in (relations or {}).items()
        }
        self.supports: dict[str, frozenset] = {name: frozenset(s) for name, s in (supports or {}).items()}

    def __repr__(self) -> str:
        return f"FiniteSpace(points={len(self.points)}, relations={sorted(self.relations)})"

    def relation(self, pairs: Iterable[tuple[Hashable, Hashable]]) -> RelationCondition:
        """Symmetric reflexive closure of the pairs."""
        result = {(p, p) for p in self.points}
        for a, b in pairs:
            if a not in self._point_set or b not in self._point_set:
                raise ControlError(f"relation mentions unknown point in {(a, b)!r}")
            result.add((a, b))
            result.add((b, a))
        return RelationCondition(frozenset(result))

    def diagonal(self) -> RelationCondition:
        return self.relation(())

    def _check(self, *conditions: Condition) -> None:
        for c in conditions:
            if not isinstance(c, RelationCondition):
                raise MixedSpacesError(f"{c!r} is not a relation condition")

    def close(self, a: Any, b: Any, condition: Condition) -> bool:
        self._check(condition)
        return (a, b) in condition.pairs

    def compose_conditions(self, first: Condition, second: Condition) -> RelationCondition:
        """Symmetric closure of second . first = {(z, x) | (y, x) in first, (z, y) in second}."""
        self._check(first, second)
        by_left: dict = {}
        for z, y in second.pairs:
            by_left.setdefault(y, []).append(z)
        composed = set()
        for y, x in first.pairs:
            for z in by_left.get(y, ()):
                composed.add((z, x))
                composed.add((x, z))
        return RelationCondition(frozenset(composed))

    def union_conditions(self, first: Condition, second: Condition) -> RelationCondition:
        self._check(first, second)
        return RelationCondition(first.pairs | second.pairs)

    def contained(self, smaller: Condition, larger: Condition) -> bool:
        self._check(smaller, larger)
        return smaller.pairs <= larger.pairs

    def minimal_condition(self, pairs: Iterable[tuple[Any, Any]]) -> RelationCondition:
        return self.relation(pairs)

    def thicken(self, points: Iterable[Any], condition: Condition) -> set:
        self._check(condition)
        core = set(points)
        return {x for x, y in condition.pairs if y in core}

    def in_support(self, label: Any, support: Any) -> bool:
        members = self.supports[support] if isinstance(support, str) else support
        return label in members

    def thicken_support(self, support: Any, condition: Condition) -> frozenset:
        members = self.supports[support] if isinstance(support, str) else support
        return frozenset(self.thicken(members, condition))

    def to_json(self) -> dict:
        return {
            "kind": "finite",
            "points": list(self.points),
            "relations": {
                name: sorted([list(p) for p in rel.pairs if p[0] != p[1]], key=repr)
                for name, rel in self.relations.items()
            },
            "supports": {name: sorted(s, key=repr) for name, s in self.supports.items()},
        }

    def condition_from_json(self, data: Any) -> RelationCondition:
        if isinstance(data, str):
            if data == "diagonal":
                return self.diagonal()
            if data not in self.relations:
                raise ControlError(f"unknown relation: {data!r}")
            return self.relations[data]
        if isinstance(data, dict) and "relation" in data:
            return self.condition_from_json(data["relation"])
        pairs = data["pairs"] if isinstance(data, dict) else data
        return self.relation(tuple(p) for p in pairs)


def space_from_json(data: Mapping[str, Any]) -> ControlSpace:
    kind = SpaceKind(data.get("kind", "metric"))
    if kind is SpaceKind.METRIC:
        return MetricSpace(int(data.get("dim", 1)), data.get("metric", "max"), data.get("points"))
    return FiniteSpace(data["points"], data.get("relations"), data.get("supports"))


# ---------------------------------------------------------------------------
# Checks and certificates
# ---------------------------------------------------------------------------


def module_pairs(M: CellularModule) -> list[tuple[Hashable, Hashable]]:
    """(e, e') for every cell e and every e' in the closure of e."""
    return [(e, other) for e in M.cells for other in sorted(M.closure_cells([M.top(e)]), key=repr)]


def map_pairs(f: ModuleMap) -> list[tuple[Hashable, Hashable]]:
    """(e, e') for every source cell e and every e' in the closure of f(e)."""
    return [
        (e, other)
        for e in f.source.cells
        for other in sorted(f.target.closure_cells([f.images[e]]), key=repr)
    ]


@dataclass
class Certificate:
    """Witness that a module or map satisfies a control condition."""

    subject: Union[CellularModule, ModuleMap]
    condition: Condition
    space: ControlSpace
    support: Any = None
    kind: str = "module"
    notes: dict = field(default_factory=dict)

    def recheck(self) -> bool:
        try:
            if self.kind == "module":
                check_module(self.subject, self.space, self.condition, self.support)
            else:
                check_map(self.subject, self.space, self.condition)
        except ControlViolation:
            return False
        return True

    def to_json(self) -> dict:
        data = {"kind": self.kind, "condition": self.condition.to_json()}
        if self.notes:
            data["notes"] = self.notes
        return data


def check_module(M: CellularModule, space: ControlSpace, condition: Condition, support: Any = None) -> Certificate:
    """Certify M at the condition (and support).

    Raises:
        ControlViolation: with (cell, other cell, distance) for the first bad pair
    """
    for e, other in module_pairs(M):
        a, b = M.label(e), M.label(other)
        if not space.close(a, b, condition):
            raise ControlViolation(e, other, space.report_distance(a, b))
    if support is not None:
        for e, c in M.cells.items():
            if not space.in_support(c.label, support):
                raise ControlViolation(e, None, "outside support")
    return Certificate(M, condition, space, support, "module")


def check_map(f: ModuleMap, space: ControlSpace, condition: Condition) -> Certificate:
    """Certify f at the condition.

    Raises:
        ControlViolation: with a witness pair (source cell, target cell)
    """
    for e, other in map_pairs(f):
        a, b = f.source.label(e), f.target.label(other)
        if not space.close(a, b, condition):
            raise ControlViolation(e, other, space.report_distance(a, b))
    return Certificate(f, condition, space, None, "map")


def minimal_module_condition(M: CellularModule, space: ControlSpace) -> Condition:
    return space.minimal_condition((M.label(e), M.label(o)) for e, o in module_pairs(M))


def minimal_certificate(f: ModuleMap, space: ControlSpace) -> Condition:
    """Smallest condition at which f is controlled (alpha for metric spaces)."""
    return space.minimal_condition((f.source.label(e), f.target.label(o)) for e, o in map_pairs(f))


def _verified(operation: str, certificate: Certificate) -> Certificate:
    if not certificate.recheck():
        error = CertificateSoundnessError(operation, ControlViolation(None, None, "re-check failed"))
        logger.error("%s", error)
        raise error
    return certificate


def certificate_compose(cert_f: Certificate, cert_g: Certificate) -> Certificate:
    """Certificate for g . f at E_g . E_f, re-checked."""
    space = cert_f.space
    if cert_g.space is not space and cert_g.space != space:
        raise MixedSpacesError("certificates live over different spaces")
    f, g = cert_f.subject, cert_g.subject
    condition = space.compose_conditions(cert_f.condition, cert_g.condition)
    return _verified("compose", Certificate(g.compose(f), condition, space, None, "map"))


def certificate_add(cert_f1: Certificate, cert_f2: Certificate) -> Certificate:
    """Certificate for f1 + f2 at the union condition, re-checked."""
    space = cert_f1.space
    condition = space.union_conditions(cert_f1.condition, cert_f2.condition)
    return _verified("add", Certificate(cert_f1.subject.add(cert_f2.subject), condition, space, None, "map"))


def certificate_union(cert: Certificate, condition: Condition) -> Certificate:
    """The same subject certified at E union E'; control only weakens upward."""
    space = cert.space
    union = space.union_conditions(cert.condition, condition)
    return _verified("union", Certificate(cert.subject, union, space, cert.support, cert.kind))


def pushout_control(
    po: Pushout,
    space: ControlSpace,
    E_B: Condition,
    E_C: Condition,
    E_f: Condition,
    induced: Optional[tuple[ModuleMap, Condition]] = None,
) -> dict[str, Certificate]:
    """Certificates predicted for a pushout along a cellular inclusion.

    D at E_C u E_f.E_B, B -> D at E_f.E_B, C -> D at E_C and the induced map
    at the condition E of the cocone.  Each certificate is re-checked.
    """
    spread = space.compose_conditions(E_B, E_f)
    certs = {
        "D": _verified("pushout D", Certificate(po.D, space.union_conditions(E_C, spread), space)),
        "leg_B": _verified("pushout B->D", Certificate(po.leg_B, spread, space, kind="map")),
        "leg_C": _verified("pushout C->D", Certificate(po.leg_C, E_C, space, kind="map")),
    }
    if induced is not None:
        g, E = induced
        certs["induced"] = _verified("pushout induced", Certificate(g, E, space, kind="map"))
    return certs


# ---------------------------------------------------------------------------
# Bounded local finiteness
# ---------------------------------------------------------------------------


@dataclass
class StagedDescription:
    """A module described stage by stage: ``stage(k)`` lists (label, dim) of new cells."""

    stage: Callable[[int], Sequence[tuple[Any, int]]]
    name: str = "staged"


@dataclass
class BLFiniteResult:
    holds: bool
    witness: dict = field(default_factory=dict)
    reason: str = ""

    def __bool__(self) -> bool:
        return self.holds


def _ball_counts(labels: Sequence[Any], centers: Iterable[Any], space: ControlSpace, condition: Condition) -> dict:
    return {repr(p): sum(1 for x in labels if space.close(x, p, condition)) for p in centers}


def bl_finite(
    subject: Union[CellularModule, StagedDescription],
    space: ControlSpace,
    radii: Sequence[Any] = (1,),
    horizon: int = 16,
    dimension_bound: Optional[int] = None,
) -> BLFiniteResult:
    """Bounded local finiteness with a witness.

    For a finite module the answer is always true; the witness records, for
    each label, the cell count in the first radius of the schedule.  For a
    staged description the stages up to ``horizon`` are generated; a center
    point from the first quarter of the stages counts as locally finite when
    its ball count no longer changes over the last quarter.
    """
    conditions = [
        space.condition(r) if isinstance(space, MetricSpace) else space.condition_from_json(r) for r in radii
    ]
    if isinstance(subject, CellularModule):
        labels = [c.label for c in subject.cells.values()]
        counts = _ball_counts(labels, dict.fromkeys(labels), space, conditions[0])
        return BLFiniteResult(True, {"dimension": subject.dimension, "counts": counts}, "finite module")

    quarter = max(1, horizon // 4)
    settle = horizon - quarter
    early: list[tuple[Any, int]] = []
    late: list[tuple[Any, int]] = []
    centers: list[Any] = []
    for k in range(horizon + 1):
        cells = list(subject.stage(k))
        late.extend(cells)
        if k <= settle:
            early.extend(cells)
        if k <= quarter:
            for label, _ in cells:
                if label not in centers:
                    centers.append(label)
    top = max((d for _, d in late), default=-1)
    if dimension_bound is not None and top > dimension_bound:
        return BLFiniteResult(False, {"dimension": top}, "dimension exceeds bound")
    growing: list = []
    for condition in conditions:
        before = _ball_counts([x for x, _ in early], centers, space, condition)
        after = _ball_counts([x for x, _ in late], centers, space, condition)
        growing = [p for p in before if before[p] != after[p]]
        if not growing:
            return BLFiniteResult(True, {"dimension": top, "counts": after}, "ball counts stabilize")
    return BLFiniteResult(False, {"dimension": top, "growing": growing}, "ball counts keep growing")
