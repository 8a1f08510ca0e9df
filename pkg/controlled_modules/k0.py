"""K_0 of finitely presented Waldhausen categories.

A category is described by finite data (``FinWaldhausenDesc``): object
classes, isomorphism and weak-equivalence generators, cofiber sequences and
a coproduct table.  Presentations are simplified by eliminating generators
that occur with a unit coefficient and the rest is reduced with the Smith
normal form from ``snf``.

The two built-in families are the colored pointed sets (ambient category
and its |A| = |C| subcategory) and the pairs of pointed sets with the
non-full subcategory of componentwise maps.
"""

import itertools
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable, Mapping, Optional, Sequence

from .constants import CATEGORY_COLORED_SETS, CATEGORY_ZAKHAREVICH, SUB_EQUAL_AC
from .control import Condition, ControlSpace, check_map, check_module
from .exceptions import (
    CellularInclusionError,
    ComplementError,
    ControlViolation,
    K0Error,
    WitnessError,
)
from .homotopy import EquivalenceWitness
from .logging_config import get_logger
from .modules import CellularModule, ModuleMap, modules_equal, require_cellular_inclusion
from .snf import cokernel_invariants, kernel_basis, smith_normal_form

logger = get_logger("k0")

Row = dict[Hashable, int]


# ---------------------------------------------------------------------------
# Groups and presentations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class AbelianGroupNF:
    """Z^rank + Z/d_1 + ... with d_1 | d_2 | ..."""

    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        for a, b in itertools.pairwise(self.torsion):
            if b % a != 0:
                raise K0Error(f"torsion coefficients {self.torsion} do not form a divisibility chain")

    def __str__(self) -> str:
        parts = []
        if self.rank == 1:
            parts.append("Z")
        elif self.rank > 1:
            parts.append(f"Z^{self.rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) or "0"

    @property
    def is_trivial(self) -> bool:
        return self.rank == 0 and not self.torsion

    @property
    def order(self) -> Optional[int]:
        """Number of elements, None when infinite."""
        if self.rank:
            return None
        total = 1
        for d in self.torsion:
            total *= d
        return total

    def to_json(self) -> dict:
        return {"rank": self.rank, "torsion": list(self.torsion)}

    @classmethod
    def from_json(cls, data: Mapping[str, Any]) -> "AbelianGroupNF":
        return cls(int(data["rank"]), tuple(int(d) for d in data.get("torsion", ())))


def _canonical(row: Mapping[Hashable, int], order: Mapping[Hashable, int]) -> tuple:
    """Sorted nonzero terms with a positive leading coefficient."""
    terms = sorted(((g, c) for g, c in row.items() if c), key=lambda t: order[t[0]])
    if terms and terms[0][1] < 0:
        terms = [(g, -c) for g, c in terms]
    return tuple(terms)


@dataclass
class ReducedPresentation:
    """A smaller presentation of the same group.

    ``values`` expresses every original generator over ``generators``.
    """

    generators: list[Hashable]
    relations: list[list[int]]
    values: dict[Hashable, Row]

    def vector(self, generator: Hashable) -> list[int]:
        value = self.values[generator]
        return [value.get(g, 0) for g in self.generators]

    def group(self) -> AbelianGroupNF:
        rank, torsion = cokernel_invariants(self.relations, len(self.generators))
        return AbelianGroupNF(rank, tuple(torsion))


class K0Presentation:
    """Abelian group on named generators with integer relation rows.

    Args:
        generators: generator names, kept in the given order
    """

    def __init__(self, generators: Iterable[Hashable] = ()):
        self.generators: list[Hashable] = []
        self._order: dict[Hashable, int] = {}
        self._rows: set[tuple] = set()
        for g in generators:
            self.add_generator(g)

    def __repr__(self) -> str:
        return f"K0Presentation(generators={len(self.generators)}, relations={len(self._rows)})"

    def add_generator(self, g: Hashable) -> None:
        if g not in self._order:
            self._order[g] = len(self.generators)
            self.generators.append(g)

    def add_relation(self, row: Mapping[Hashable, int]) -> None:
        """Add the relation sum(c * g) = 0.

        Raises:
            K0Error: if the row names an unknown generator
        """
        combined: Row = {}
        for g, c in row.items():
            if g not in self._order:
                raise K0Error(f"relation references unknown generator {g!r}")
            combined[g] = combined.get(g, 0) + int(c)
        canonical = _canonical(combined, self._order)
        if canonical:
            self._rows.add(canonical)

    def add_sum(self, parts: Sequence[Hashable], total: Hashable) -> None:
        """[p_1] + ... + [p_k] = [total]"""
        row: Row = {total: -1}
        for p in parts:
            row[p] = row.get(p, 0) + 1
        self.add_relation(row)

    def add_equal(self, a: Hashable, b: Hashable) -> None:
        self.add_relation({a: 1, b: -1} if a != b else {})

    def add_zero(self, a: Hashable) -> None:
        self.add_relation({a: 1})

    @property
    def relations(self) -> list[tuple]:
        """Relation rows in canonical order."""
        return sorted(self._rows, key=lambda r: [(self._order[g], c) for g, c in r])

    def matrix(self) -> list[list[int]]:
        rows = []
        for r in self.relations:
            dense = [0] * len(self.generators)
            for g, c in r:
                dense[self._order[g]] = c
            rows.append(dense)
        return rows

    def copy(self) -> "K0Presentation":
        other = K0Presentation(self.generators)
        other._rows = set(self._rows)
        return other

    def reduce(self) -> ReducedPresentation:
        """Eliminate generators that occur with coefficient +-1 in some relation."""
        live: dict[int, Row] = {k: dict(r) for k, r in enumerate(self.relations)}
        index: dict[Hashable, set[int]] = {g: set() for g in self.generators}
        for k, row in live.items():
            for g in row:
                index[g].add(k)
        solved: list[tuple[Hashable, Row]] = []
        changed = True
        while changed:
            changed = False
            for k in list(live):
                row = live.get(k)
                if row is None:
                    continue
                units = [g for g, c in row.items() if c in (1, -1)]
                if not units:
                    continue
                g = min(units, key=lambda h: (len(index[h]), -self._order[h]))
                sign = row[g]
                expression = {h: -sign * c for h, c in row.items() if h != g}
                for h in row:
                    index[h].discard(k)
                del live[k]
                for other in list(index[g]):
                    target = live[other]
                    coefficient = target.pop(g)
                    for h, c in expression.items():
                        value = target.get(h, 0) + coefficient * c
                        if value:
                            target[h] = value
                            index[h].add(other)
                        else:
                            target.pop(h, None)
                            index[h].discard(other)
                    if not target:
                        del live[other]
                del index[g]
                solved.append((g, expression))
                changed = True
        kept = [g for g in self.generators if g in index]
        values: dict[Hashable, Row] = {g: {g: 1} for g in kept}
        for g, expression in reversed(solved):
            value: Row = {}
            for h, c in expression.items():
                for base, d in values[h].items():
                    value[base] = value.get(base, 0) + c * d
            values[g] = {h: c for h, c in value.items() if c}
        position = {g: i for i, g in enumerate(kept)}
        rows = set()
        for row in live.values():
            canonical = _canonical(row, position)
            if canonical:
                rows.add(canonical)
        dense = []
        for r in sorted(rows, key=lambda r: [(position[g], c) for g, c in r]):
            vector = [0] * len(kept)
            for g, c in r:
                vector[position[g]] = c
            dense.append(vector)
        logger.debug("presentation reduced: %d -> %d generators, %d relations", len(self.generators), len(kept), len(dense))
        return ReducedPresentation(kept, dense, values)

    def group(self) -> AbelianGroupNF:
        return self.reduce().group()


# ---------------------------------------------------------------------------
# Category descriptions
# ---------------------------------------------------------------------------


def _freeze(value: Any) -> Hashable:
    """JSON lists become tuples so they can name objects."""
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value


def _thaw(value: Any) -> Any:
    if isinstance(value, tuple):
        return [_thaw(v) for v in value]
    return value


@dataclass
class FinWaldhausenDesc:
    """Finite data of a Waldhausen category, objects up to isomorphism.

    Coproduct entries ``(x, y, z)`` say x v y = z; each one is also the split
    cofiber sequence x >-> z ->> y, so ``cofiber_sequences`` only needs the
    non-split ones.  ``core`` lists the objects whose cofinality is checked;
    the remaining objects give their complements room inside the truncation.
    """

    name: str
    objects: list[Hashable]
    isomorphisms: list[tuple[Hashable, Hashable]] = field(default_factory=list)
    weak_equivalences: list[tuple[Hashable, Hashable]] = field(default_factory=list)
    cofiber_sequences: list[tuple[Hashable, Hashable, Hashable]] = field(default_factory=list)
    coproducts: list[tuple[Hashable, Hashable, Hashable]] = field(default_factory=list)
    zero: Optional[Hashable] = None
    core: Optional[list[Hashable]] = None
    full: bool = True
    bound: Optional[int] = None

    def __post_init__(self) -> None:
        self._table: Optional[dict[tuple[Hashable, Hashable], Hashable]] = None

    def validate(self) -> "FinWaldhausenDesc":
        """Raises K0Error when some datum names an unknown object."""
        known = set(self.objects)
        if len(known) != len(self.objects):
            raise K0Error(f"{self.name}: duplicate objects")
        groups = (
            ("isomorphism", self.isomorphisms),
            ("weak equivalence", self.weak_equivalences),
            ("cofiber sequence", self.cofiber_sequences),
            ("coproduct", self.coproducts),
        )
        for kind, entries in groups:
            for entry in entries:
                for x in entry:
                    if x not in known:
                        raise K0Error(f"{self.name}: {kind} {entry!r} references unknown object {x!r}")
        for x in [self.zero] if self.zero is not None else []:
            if x not in known:
                raise K0Error(f"{self.name}: unknown zero object {x!r}")
        for x in self.core or []:
            if x not in known:
                raise K0Error(f"{self.name}: unknown core object {x!r}")
        table: dict[tuple[Hashable, Hashable], Hashable] = {}
        for x, y, z in self.coproducts:
            for key in ((x, y), (y, x)):
                if table.setdefault(key, z) != z:
                    raise K0Error(f"{self.name}: coproduct of {x!r} and {y!r} listed twice")
        return self

    @property
    def table(self) -> dict[tuple[Hashable, Hashable], Hashable]:
        if self._table is None:
            self._table = {}
            for x, y, z in self.coproducts:
                self._table[(x, y)] = z
                self._table[(y, x)] = z
        return self._table

    def join(self, x: Hashable, y: Hashable) -> Optional[Hashable]:
        """x v y when it lies inside the description."""
        return self.table.get((x, y))

    @property
    def core_objects(self) -> list[Hashable]:
        return list(self.core) if self.core is not None else list(self.objects)

    def restrict(self, keep: Iterable[Hashable], name: Optional[str] = None) -> "FinWaldhausenDesc":
        """The description on a subset of objects, dropping data that leaves it."""
        keep = set(keep)

        def inside(entries: Iterable[tuple]) -> list[tuple]:
            return [e for e in entries if all(x in keep for x in e)]

        return FinWaldhausenDesc(
            name=name or self.name,
            objects=[x for x in self.objects if x in keep],
            isomorphisms=inside(self.isomorphisms),
            weak_equivalences=inside(self.weak_equivalences),
            cofiber_sequences=inside(self.cofiber_sequences),
            coproducts=inside(self.coproducts),
            zero=self.zero if self.zero in keep else None,
            core=[x for x in self.core if x in keep] if self.core is not None else None,
            full=self.full,
            bound=self.bound,
        )

    def to_json(self) -> dict:
        data: dict[str, Any] = {
            "name": self.name,
            "objects": [_thaw(x) for x in self.objects],
            "isomorphisms": [[_thaw(x) for x in e] for e in self.isomorphisms],
            "weak_equivalences": [[_thaw(x) for x in e] for e in self.weak_equivalences],
            "cofiber_sequences": [[_thaw(x) for x in e] for e in self.cofiber_sequences],
            "coproducts": [[_thaw(x) for x in e] for e in self.coproducts],
            "full": self.full,
        }
        if self.zero is not None:
            data["zero"] = _thaw(self.zero)
        if self.core is not None:
            data["core"] = [_thaw(x) for x in self.core]
        if self.bound is not None:
            data["bound"] = self.bound
        return data


def from_json(data: Mapping[str, Any]) -> FinWaldhausenDesc:
    """Category description from its JSON form.

    Raises:
        K0Error: on missing keys or references to unknown objects
    """
    try:
        objects = [_freeze(x) for x in data["objects"]]
    except (KeyError, TypeError) as err:
        raise K0Error("category description needs an 'objects' list") from err

    def entries(key: str, width: int) -> list[tuple]:
        result = []
        for entry in data.get(key, []):
            if not isinstance(entry, list) or len(entry) != width:
                raise K0Error(f"'{key}' entries must be lists of {width} objects, got {entry!r}")
            result.append(tuple(_freeze(x) for x in entry))
        return result

    desc = FinWaldhausenDesc(
        name=str(data.get("name", "category")),
        objects=objects,
        isomorphisms=entries("isomorphisms", 2),
        weak_equivalences=entries("weak_equivalences", 2),
        cofiber_sequences=entries("cofiber_sequences", 3),
        coproducts=entries("coproducts", 3),
        zero=_freeze(data["zero"]) if data.get("zero") is not None else None,
        core=[_freeze(x) for x in data["core"]] if data.get("core") is not None else None,
        full=bool(data.get("full", True)),
        bound=data.get("bound"),
    )
    return desc.validate()


def presentation_from_desc(desc: FinWaldhausenDesc, split: bool = False, weak_equivalences: bool = True) -> K0Presentation:
    """Generators are the objects; relations as for K_0, or K_0' when ``split``.

    K_0 uses isomorphisms, weak equivalences, cofiber sequences and the
    split sequences of the coproduct table.  K_0' keeps only isomorphisms
    and the coproduct table.
    """
    p = K0Presentation(desc.objects)
    if desc.zero is not None:
        p.add_zero(desc.zero)
    for a, b in desc.isomorphisms:
        p.add_equal(a, b)
    for x, y, z in desc.coproducts:
        p.add_sum((x, y), z)
    if not split:
        if weak_equivalences:
            for a, b in desc.weak_equivalences:
                p.add_equal(a, b)
        for a, b, c in desc.cofiber_sequences:
            p.add_sum((a, c), b)
    return p


def k0(desc: FinWaldhausenDesc) -> AbelianGroupNF:
    group = presentation_from_desc(desc).group()
    logger.debug("K0(%s) = %s", desc.name, group)
    return group


def k0_split(desc: FinWaldhausenDesc) -> AbelianGroupNF:
    group = presentation_from_desc(desc, split=True).group()
    logger.debug("K0'(%s) = %s", desc.name, group)
    return group


# ---------------------------------------------------------------------------
# Cofinality and the relative groups
# ---------------------------------------------------------------------------


@dataclass
class CofinalityResult:
    """Complement witnesses X -> Y with X v Y in the subcategory."""

    holds: bool
    strict: bool
    witnesses: dict[Hashable, Hashable]
    missing: list[Hashable]
    bound: Optional[int]

    def describe(self) -> str:
        kind = "strictly cofinal" if self.strict else "cofinal"
        if self.holds:
            return f"{kind}: complements found for {len(self.witnesses)} objects"
        where = f"within bound {self.bound}" if self.bound is not None else "within the description"
        return f"not {kind}: no complement for {self.missing[0]!r} {where}"

    def to_json(self) -> dict:
        return {
            "holds": self.holds,
            "strict": self.strict,
            "witnesses": [[_thaw(x), _thaw(y)] for x, y in self.witnesses.items()],
            "missing": [_thaw(x) for x in self.missing],
            "message": self.describe(),
        }


def _require_subset(sub: FinWaldhausenDesc, amb: FinWaldhausenDesc) -> None:
    extra = [x for x in sub.objects if x not in set(amb.objects)]
    if extra:
        raise K0Error(f"{sub.name} is not contained in {amb.name}: {extra[0]!r}")


def _complements(sub: FinWaldhausenDesc, amb: FinWaldhausenDesc, candidates: Sequence[Hashable], strict: bool) -> CofinalityResult:
    _require_subset(sub, amb)
    inside = set(sub.objects)
    witnesses: dict[Hashable, Hashable] = {}
    missing: list[Hashable] = []
    for x in amb.core_objects:
        found = next((y for y in candidates if amb.join(x, y) in inside), None)
        if found is None:
            missing.append(x)
        else:
            witnesses[x] = found
    return CofinalityResult(not missing, strict, witnesses, missing, amb.bound)


def cofinality(sub: FinWaldhausenDesc, amb: FinWaldhausenDesc) -> CofinalityResult:
    """Each core X of amb has some Y in amb with X v Y in sub."""
    return _complements(sub, amb, amb.objects, strict=False)


def strict_cofinality(sub: FinWaldhausenDesc, amb: FinWaldhausenDesc) -> CofinalityResult:
    """Each core X of amb has some A in sub with X v A in sub."""
    result = _complements(sub, amb, sub.objects, strict=True)
    logger.info("%s in %s: %s", sub.name, amb.name, result.describe())
    return result


def saturated(sub: FinWaldhausenDesc, amb: FinWaldhausenDesc) -> bool:
    """No weak equivalence of amb joins an object of sub to one outside it."""
    inside = set(sub.objects)
    return all((a in inside) == (b in inside) for a, b in itertools.chain(amb.isomorphisms, amb.weak_equivalences))


def extension_closed(sub: FinWaldhausenDesc, amb: FinWaldhausenDesc) -> bool:
    inside = set(sub.objects)
    sequences = itertools.chain(amb.cofiber_sequences, ((x, z, y) for x, y, z in amb.coproducts))
    return all(b in inside for a, b, c in sequences if a in inside and c in inside)


def _in_span(vector: Sequence[int], rows: Sequence[Sequence[int]], columns: int) -> bool:
    if not any(vector):
        return True
    if not rows:
        return False
    before = smith_normal_form(rows, columns).invariants
    after = smith_normal_form(list(rows) + [list(vector)], columns).invariants
    return len(before) == len(after) and abs(_product(before)) == abs(_product(after))


def _product(values: Iterable[int]) -> int:
    total = 1
    for v in values:
        total *= v
    return total


def _injective(sub: ReducedPresentation, amb: ReducedPresentation) -> bool:
    """Whether Z^S / R_S -> Z^T / R_T, induced by the object inclusion, is injective."""
    k_s, k_t = len(sub.generators), len(amb.generators)
    if k_s == 0:
        return True
    images = [amb.vector(g) for g in sub.generators]
    columns = k_s + len(amb.relations)
    matrix = [[images[j][i] for j in range(k_s)] + [-r[i] for r in amb.relations] for i in range(k_t)]
    kernel = kernel_basis([row for row in matrix if any(row)], columns)
    return all(_in_span(v[:k_s], sub.relations, k_s) for v in kernel)


@dataclass
class RelativeGroups:
    """G = coker(K_0(sub) -> K_0(amb)) and G' for K_0', with the hypotheses."""

    sub: AbelianGroupNF
    ambient: AbelianGroupNF
    quotient: AbelianGroupNF
    split_quotient: AbelianGroupNF
    isomorphic: bool
    injective: bool
    surjective: bool
    weq_redundant: bool
    hypotheses: dict[str, bool]
    cofinality: CofinalityResult

    @property
    def hypotheses_hold(self) -> bool:
        return all(self.hypotheses.values())

    def to_json(self) -> dict:
        return {
            "sub": self.sub.to_json(),
            "ambient": self.ambient.to_json(),
            "G": self.quotient.to_json(),
            "G_split": self.split_quotient.to_json(),
            "isomorphic": self.isomorphic,
            "injective": self.injective,
            "surjective": self.surjective,
            "weq_redundant": self.weq_redundant,
            "hypotheses": dict(self.hypotheses),
            "cofinality": self.cofinality.to_json(),
        }


def _kill(p: K0Presentation, objects: Iterable[Hashable]) -> K0Presentation:
    q = p.copy()
    for x in objects:
        q.add_zero(x)
    return q


def relative_groups(
    sub: FinWaldhausenDesc,
    amb: FinWaldhausenDesc,
    complements: Optional[Mapping[Hashable, Hashable]] = None,
    declared_cofinal: bool = False,
) -> RelativeGroups:
    """Compare G' -> G for sub inside amb.

    G and G' are presented on the objects of amb with the objects of sub
    killed.  G' -> G is onto by construction, so it is an isomorphism
    exactly when the normal forms agree.

    Raises:
        ComplementError: if ``declared_cofinal`` and some core object has no
            complement, or a supplied complement does not work
    """
    _require_subset(sub, amb)
    if complements is not None:
        inside = set(sub.objects)
        for x, y in complements.items():
            if amb.join(x, y) not in inside:
                raise ComplementError(x)
        missing = [x for x in amb.core_objects if x not in complements]
        found = CofinalityResult(not missing, False, dict(complements), missing, amb.bound)
    else:
        found = cofinality(sub, amb)
    if declared_cofinal and not found.holds:
        error = ComplementError(found.missing[0])
        logger.error("%s", error)
        raise error

    full_p = presentation_from_desc(amb)
    ambient_reduced = full_p.reduce()
    sub_reduced = presentation_from_desc(sub).reduce()
    G = _kill(full_p, sub.objects).group()
    G_split = _kill(presentation_from_desc(amb, split=True), sub.objects).group()
    G_no_weq = _kill(presentation_from_desc(amb, weak_equivalences=False), sub.objects).group()
    hypotheses = {
        "saturated": saturated(sub, amb),
        "extension_closed": extension_closed(sub, amb),
        "cofinal": found.holds,
        "full": sub.full,
    }
    result = RelativeGroups(
        sub=sub_reduced.group(),
        ambient=ambient_reduced.group(),
        quotient=G,
        split_quotient=G_split,
        isomorphic=G == G_split,
        injective=_injective(sub_reduced, ambient_reduced),
        surjective=G.is_trivial,
        weq_redundant=G == G_no_weq,
        hypotheses=hypotheses,
        cofinality=found,
    )
    logger.info(
        "relative groups %s in %s: G=%s, G'=%s, hypotheses %s",
        sub.name, amb.name, G, G_split, hypotheses,
    )
    return result


# ---------------------------------------------------------------------------
# Built-in categories
# ---------------------------------------------------------------------------


def _require_size(s: int) -> None:
    if s < 0:
        raise K0Error(f"size must be non-negative, got {s}")


def _boxes(dims: int, top: int) -> list[tuple[int, ...]]:
    return list(itertools.product(range(top + 1), repeat=dims))


def _vector_coproducts(objects: Sequence[tuple[int, ...]]) -> list[tuple]:
    known = set(objects)
    table = []
    for i, x in enumerate(objects):
        for y in objects[i:]:
            z = tuple(a + b for a, b in zip(x, y))
            if z in known:
                table.append((x, y, z))
    return table


def generate_colored_sets(s: int, sub: Optional[str] = None) -> FinWaldhausenDesc:
    """Pointed sets A v B v C, objects (|A|, |B|, |C|).

    Maps may recolor B or C to A or send points to the basepoint, so the
    weak equivalences (bijections) move single points from B or C to A.
    Cofibrations are split injections, which preserve colors.  Objects run
    up to 2s per slot and the core up to s.  With ``sub="equal-AC"`` the
    full subcategory |A| = |C| is returned; its weak equivalences are
    isomorphisms.
    """
    _require_size(s)
    if sub not in (None, SUB_EQUAL_AC):
        raise K0Error(f"unknown subcategory {sub!r}; expected {SUB_EQUAL_AC!r}")
    objects = _boxes(3, 2 * s)
    core = _boxes(3, s)
    if sub == SUB_EQUAL_AC:
        objects = [x for x in objects if x[0] == x[2]]
        core = [x for x in core if x[0] == x[2]]
        desc = FinWaldhausenDesc(
            name=f"{CATEGORY_COLORED_SETS}[{SUB_EQUAL_AC}]({s})",
            objects=objects,
            coproducts=_vector_coproducts(objects),
            zero=(0, 0, 0),
            core=core,
            bound=s,
        )
        return desc.validate()
    known = set(objects)
    weqs = []
    for a, b, c in objects:
        for target in ((a + 1, b - 1, c), (a + 1, b, c - 1)):
            if min(target) >= 0 and target in known:
                weqs.append(((a, b, c), target))
    desc = FinWaldhausenDesc(
        name=f"{CATEGORY_COLORED_SETS}({s})",
        objects=objects,
        weak_equivalences=weqs,
        coproducts=_vector_coproducts(objects),
        zero=(0, 0, 0),
        core=core,
        bound=s,
    )
    logger.debug("colored sets at size %d: %d objects, %d weak equivalences", s, len(objects), len(weqs))
    return desc.validate()


def generate_zakharevich(s: int) -> tuple[FinWaldhausenDesc, FinWaldhausenDesc]:
    """(B, C) on pairs of pointed finite sets, objects (|A|, |B|).

    In C a morphism is any pointed map of A v B, so (a, b) and (a', b')
    are isomorphic when a + b = a' + b'; weak equivalences are the
    isomorphisms.  B has the same objects with componentwise maps only,
    so it is cofinal but not full.
    """
    _require_size(s)
    objects = _boxes(2, 2 * s)
    core = _boxes(2, s)
    known = set(objects)
    isos = [((a, b), (a + 1, b - 1)) for a, b in objects if b > 0 and (a + 1, b - 1) in known]
    table = _vector_coproducts(objects)
    ambient = FinWaldhausenDesc(
        name=f"{CATEGORY_ZAKHAREVICH}-C({s})",
        objects=objects,
        isomorphisms=isos,
        coproducts=table,
        zero=(0, 0),
        core=core,
        bound=s,
    ).validate()
    sub = FinWaldhausenDesc(
        name=f"{CATEGORY_ZAKHAREVICH}-B({s})",
        objects=list(objects),
        coproducts=list(table),
        zero=(0, 0),
        core=list(core),
        full=False,
        bound=s,
    ).validate()
    return sub, ambient


def builtin_category(category: str, s: int, sub: Optional[str] = None) -> FinWaldhausenDesc:
    """Look up a built-in description by its CLI name.

    For the pairs family ``sub`` selects "B"; otherwise C is returned.
    """
    if category == CATEGORY_COLORED_SETS:
        return generate_colored_sets(s, sub)
    if category == CATEGORY_ZAKHAREVICH:
        b, c = generate_zakharevich(s)
        return b if sub == "B" else c
    raise K0Error(f"unknown category {category!r}")


@dataclass
class StabilityReport:
    """K_0 per truncation size and whether the answers agree."""

    category: str
    sizes: list[int]
    groups: list[AbelianGroupNF]
    sub: Optional[str] = None

    @property
    def stable(self) -> bool:
        return len(set(self.groups)) <= 1

    def to_json(self) -> dict:
        return {
            "category": self.category,
            "sub": self.sub,
            "sizes": list(self.sizes),
            "groups": [g.to_json() for g in self.groups],
            "stable": self.stable,
        }


def stability_report(category: str, sizes: Iterable[int] = (1, 2, 3), sub: Optional[str] = None) -> StabilityReport:
    sizes = list(sizes)
    groups = [k0(builtin_category(category, s, sub)) for s in sizes]
    report = StabilityReport(category, sizes, groups, sub)
    if not report.stable:
        logger.warning("K0 of %s changes with the truncation: %s", category, [str(g) for g in groups])
    return report


# ---------------------------------------------------------------------------
# Controlled modules
# ---------------------------------------------------------------------------


@dataclass
class ObjectEquivalence:
    source: str
    target: str
    witness: EquivalenceWitness


@dataclass
class CofiberData:
    """first >-> middle ->> last with middle/first identified with last."""

    first: str
    middle: str
    last: str
    inclusion: ModuleMap
    projection: ModuleMap


@dataclass
class ControlledCategory:
    """Named controlled modules with equivalence and cofiber witnesses."""

    objects: dict[str, CellularModule]
    equivalences: list[ObjectEquivalence] = field(default_factory=list)
    cofiber_sequences: list[CofiberData] = field(default_factory=list)
    zero: Optional[str] = None
    space: Optional[ControlSpace] = None
    condition: Optional[Condition] = None
    name: str = "controlled"


def _module(category: ControlledCategory, name: str) -> CellularModule:
    try:
        return category.objects[name]
    except KeyError:
        raise K0Error(f"{category.name}: unknown object {name!r}") from None


def _require_endpoints(f: ModuleMap, source: CellularModule, target: CellularModule, what: str) -> None:
    if not modules_equal(f.source, source) or not modules_equal(f.target, target):
        raise K0Error(f"{what}: map does not go between the named objects")


def _check_equivalence(category: ControlledCategory, eq: ObjectEquivalence) -> None:
    what = f"equivalence {eq.source} -> {eq.target}"
    _require_endpoints(eq.witness.forward, _module(category, eq.source), _module(category, eq.target), what)
    try:
        eq.witness.verify()
    except WitnessError as err:
        logger.error("%s rejected: %s", what, err)
        raise K0Error(f"{what} rejected: {err}") from err
    if category.space is not None and category.condition is not None:
        for m in (eq.witness.forward, eq.witness.inverse):
            try:
                check_map(m, category.space, category.condition)
            except ControlViolation as err:
                raise K0Error(f"{what} is not controlled: {err}") from err


def _check_cofiber(category: ControlledCategory, seq: CofiberData) -> None:
    what = f"cofiber sequence {seq.first} -> {seq.middle} -> {seq.last}"
    A, B, C = (_module(category, n) for n in (seq.first, seq.middle, seq.last))
    _require_endpoints(seq.inclusion, A, B, what)
    _require_endpoints(seq.projection, B, C, what)
    try:
        correspondence = require_cellular_inclusion(seq.inclusion)
    except CellularInclusionError as err:
        raise K0Error(f"{what}: {err}") from err
    image = set(correspondence.values())
    hit: set[Hashable] = set()
    for b in B.cells:
        x = seq.projection.images[b]
        if b in image:
            if x:
                raise K0Error(f"{what}: projection does not kill {b!r}")
            continue
        c = next((c for c in C.cells if C.top(c) == x), None)
        if c is None or c in hit:
            raise K0Error(f"{what}: projection is not a cellular bijection at {b!r}")
        hit.add(c)
    if hit != set(C.cells):
        raise K0Error(f"{what}: projection misses cells of {seq.last}")


def k0_controlled(category: ControlledCategory, truncation: Optional[int] = None) -> AbelianGroupNF:
    """K_0 presented by verified witnesses.

    Objects with more than ``truncation`` cells are dropped together with
    every relation that mentions them.

    Raises:
        K0Error: if a witness fails verification or a module is not controlled
    """
    if category.space is not None and category.condition is not None:
        for name, M in category.objects.items():
            try:
                check_module(M, category.space, category.condition)
            except ControlViolation as err:
                raise K0Error(f"object {name} is not controlled: {err}") from err
    if category.zero is not None and len(_module(category, category.zero)):
        raise K0Error(f"zero object {category.zero} has cells")
    for eq in category.equivalences:
        _check_equivalence(category, eq)
    for seq in category.cofiber_sequences:
        _check_cofiber(category, seq)
    desc = FinWaldhausenDesc(
        name=category.name,
        objects=list(category.objects),
        weak_equivalences=[(eq.source, eq.target) for eq in category.equivalences],
        cofiber_sequences=[(s.first, s.middle, s.last) for s in category.cofiber_sequences],
        zero=category.zero,
    ).validate()
    if truncation is not None:
        keep = [n for n, M in category.objects.items() if len(M) <= truncation]
        if len(keep) < len(desc.objects):
            logger.warning("truncation %d drops %d objects", truncation, len(desc.objects) - len(keep))
        desc = desc.restrict(keep)
    return k0(desc)
