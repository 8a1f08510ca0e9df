"""Cellular simplicial modules over constant coefficient rings.

A module is a list of cells in skeletal order.  A k-cell carries its
attaching data, the k + 1 elements d_0 e, ..., d_k e of degree k - 1, and a
control label.  In degree n the module is free on the pairs (cell e,
surjection [n] -> [dim e]); an :class:`Element` is a finite linear
combination of such pairs.

Maps are determined by their values on cells.  Everything here is immutable
once built; derived modules (tensors, pushouts, quotients) are fresh values.
"""

import random
from dataclasses import dataclass, field
from itertools import combinations
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Optional, Sequence

from .config import get_config
from .constants import EXTRA_CHECK_DEGREES
from .exceptions import (
    AttachError,
    CellularInclusionError,
    ModuleError,
    RingError,
    SubmoduleError,
    WellDefinednessError,
)
from .logging_config import get_logger
from .rings import IntegerRing, Ring, RingMap
from .simplicial import (
    FinSimplicialSet,
    Monotone,
    SSetMap,
    codegeneracy,
    coface,
    common_collapse,
    compose,
    drop_index,
    factor,
    identity,
    surjections,
)

logger = get_logger("modules")

Basis = tuple[Hashable, Monotone]


class Element:
    """Homogeneous element of degree ``degree``: {(cell, surjection): coefficient}.

    Terms never carry zero coefficients.  Build elements through a module
    (``M.basis_element``, ``M.linear``) so coefficients are normalized.
    """

    __slots__ = ("degree", "terms", "_hash")

    def __init__(self, degree: int, terms: Optional[Mapping[Basis, Any]] = None):
        self.degree = degree
        self.terms: dict[Basis, Any] = dict(terms or {})
        self._hash: Optional[int] = None

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Element) and self.degree == other.degree and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.degree, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __repr__(self) -> str:
        body = " + ".join(f"{c!r}*{e!r}{s}" for (e, s), c in self.sorted_terms())
        return f"Element[{self.degree}]({body or '0'})"

    def cells(self) -> set[Hashable]:
        return {e for e, _ in self.terms}

    def sorted_terms(self) -> list[tuple[Basis, Any]]:
        """Terms in canonical order (by cell repr, then surjection)."""
        return sorted(self.terms.items(), key=lambda item: (repr(item[0][0]), item[0][1]))


@dataclass(frozen=True)
class Cell:
    """A cell of dimension ``dim``; ``attach[i]`` is its i-th face."""

    dim: int
    attach: tuple[Element, ...] = ()
    label: Any = None


class CellularModule:
    """A cellular simplicial module over ``ring``.

    Args:
        ring: coefficient ring (constant simplicial ring)
        cells: name -> Cell; attaching data may only reference earlier cells
    """

    def __init__(self, ring: Ring, cells: Optional[Mapping[Hashable, Cell]] = None):
        self.ring = ring
        self.cells: dict[Hashable, Cell] = dict(cells or {})
        self._cache: dict[tuple[Hashable, Monotone], Element] = {}
        self._tensors: dict[int, tuple[FinSimplicialSet, "TensorModule"]] = {}

    def __repr__(self) -> str:
        return f"CellularModule({self.ring!r}, cells={len(self.cells)})"

    def __len__(self) -> int:
        return len(self.cells)

    def __contains__(self, name: Hashable) -> bool:
        return name in self.cells

    # -- structure -------------------------------------------------------

    @property
    def dimension(self) -> int:
        return max((c.dim for c in self.cells.values()), default=-1)

    def dim(self, name: Hashable) -> int:
        return self.cells[name].dim

    def label(self, name: Hashable) -> Any:
        return self.cells[name].label

    def labels(self) -> dict[Hashable, Any]:
        return {e: c.label for e, c in self.cells.items()}

    def skeletal_order(self) -> list[Hashable]:
        """Cells sorted by dimension, ties in construction order."""
        position = {e: k for k, e in enumerate(self.cells)}
        return sorted(self.cells, key=lambda e: (self.cells[e].dim, position[e]))

    def basis(self, n: int) -> list[Basis]:
        """The free basis in degree n."""
        return [(e, s) for e, c in self.cells.items() for s in surjections(n, c.dim)]

    def rank(self, n: int) -> int:
        return len(self.basis(n))

    def attach_cell(self, name: Hashable, dim: int, attach: Sequence[Element] = (), label: Any = None) -> "CellularModule":
        """Return a new module with one more cell.

        Raises:
            AttachError: with the first face index where the boundary data
                fails d_i a_j = d_{j-1} a_i, or references a bad cell
        """
        if name in self.cells:
            raise AttachError(f"cell {name!r} already exists", face=-1)
        attach = tuple(attach)
        expected = dim + 1 if dim > 0 else 0
        if len(attach) != expected:
            raise AttachError(f"{dim}-cell needs {expected} attaching elements, got {len(attach)}", face=len(attach))
        for i, a in enumerate(attach):
            if a.degree != dim - 1:
                raise AttachError(f"attaching element has degree {a.degree}, expected {dim - 1}", face=i)
            for e in a.cells():
                if e not in self.cells or self.cells[e].dim >= dim:
                    raise AttachError(f"attaching element references {e!r}", face=i)
        for j in range(1, len(attach)):
            for i in range(j):
                if dim >= 2 and self.face(attach[j], i) != self.face(attach[i], j - 1):
                    raise AttachError(f"boundary data incompatible for new cell {name!r}", face=i)
        cells = dict(self.cells)
        cells[name] = Cell(dim, attach, label)
        logger.debug("attached %d-cell %r", dim, name)
        return CellularModule(self.ring, cells)

    def relabel(self, labels: Mapping[Hashable, Any]) -> "CellularModule":
        """Same cells with (some) labels replaced."""
        return CellularModule(
            self.ring,
            {e: Cell(c.dim, c.attach, labels.get(e, c.label)) for e, c in self.cells.items()},
        )

    # -- elements --------------------------------------------------------

    def zero(self, degree: int) -> Element:
        return Element(degree)

    def basis_element(self, cell: Hashable, surj: Optional[Monotone] = None, coef: Any = None) -> Element:
        if surj is None:
            surj = identity(self.cells[cell].dim)
        c = self.ring.one() if coef is None else self.ring.normalize(coef)
        return Element(len(surj) - 1, {} if self.ring.is_zero(c) else {(cell, tuple(surj)): c})

    def top(self, cell: Hashable) -> Element:
        """The cell as an element of its own degree."""
        return self.basis_element(cell)

    def linear(self, degree: int, pieces: Iterable[tuple[Any, Element]]) -> Element:
        """Sum of coef * element (coefficients multiply on the left)."""
        ring = self.ring
        acc: dict[Basis, Any] = {}
        for coef, x in pieces:
            if x.degree != degree:
                raise ModuleError(f"degree mismatch: {x.degree} != {degree}")
            for key, c in x.terms.items():
                value = ring.mul(coef, c)
                acc[key] = ring.add(acc[key], value) if key in acc else value
        return Element(degree, {k: v for k, v in acc.items() if not ring.is_zero(v)})

    def add(self, x: Element, y: Element) -> Element:
        one = self.ring.one()
        return self.linear(x.degree, [(one, x), (one, y)])

    def sub(self, x: Element, y: Element) -> Element:
        return self.linear(x.degree, [(self.ring.one(), x), (self.ring.neg(self.ring.one()), y)])

    def neg(self, x: Element) -> Element:
        return self.linear(x.degree, [(self.ring.neg(self.ring.one()), x)])

    def scale(self, coef: Any, x: Element) -> Element:
        return self.linear(x.degree, [(self.ring.normalize(coef), x)])

    def from_terms(self, degree: int, triples: Iterable[tuple[Any, Hashable, Monotone]]) -> Element:
        """Element from (coefficient, cell, surjection) triples."""
        return self.linear(degree, [(self.ring.normalize(c), self.basis_element(e, s)) for c, e, s in triples])

    # -- simplicial operators -------------------------------------------------

    def apply(self, x: Element, theta: Monotone) -> Element:
        """Evaluate ``x . theta`` for a monotone theta: [m] -> [degree x]."""
        m = len(theta) - 1
        return self.linear(m, [(c, self._resolve(e, compose(s, theta))) for (e, s), c in x.terms.items()])

    def _resolve(self, cell: Hashable, phi: Monotone) -> Element:
        key = (cell, phi)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        image, surj = factor(phi)
        c = self.cells[cell]
        if len(image) == c.dim + 1:
            result = Element(len(phi) - 1, {(cell, surj): self.ring.one()})
        else:
            j = max(set(range(c.dim + 1)) - set(image))
            result = self.apply(c.attach[j], drop_index(phi, j))
        self._cache[key] = result
        return result

    def face(self, x: Element, i: int) -> Element:
        if x.degree < 1:
            raise ModuleError("elements of degree 0 have no faces")
        return self.apply(x, coface(x.degree, i))

    def degeneracy(self, x: Element, j: int) -> Element:
        return self.apply(x, codegeneracy(x.degree, j))

    def check_identities(self, max_degree: Optional[int] = None) -> None:
        """Check the simplicial identities on the whole basis up to max_degree.

        Raises:
            ModuleError: naming the first failing identity and basis element
        """
        top = self.dimension + EXTRA_CHECK_DEGREES if max_degree is None else max_degree
        for n in range(top + 1):
            for e, s in self.basis(n):
                x = self.basis_element(e, s)
                for j in range(n + 1):
                    y = self.degeneracy(x, j)
                    if self.face(y, j) != x or self.face(y, j + 1) != x:
                        raise ModuleError(f"d s_{j} != id on {(e, s)!r}")
                for j in range(1, n + 1):
                    for i in range(j):
                        if self.face(self.face(x, j), i) != self.face(self.face(x, i), j - 1):
                            raise ModuleError(f"d_{i} d_{j} != d_{j - 1} d_{i} on {(e, s)!r}")

    # -- closures ----------------------------------------------------------

    def closure_cells(self, elements: Iterable[Element]) -> set[Hashable]:
        """Cells of the smallest cellular submodule containing the elements."""
        result: set[Hashable] = set()
        stack = [e for x in elements for e in x.cells()]
        while stack:
            e = stack.pop()
            if e in result:
                continue
            result.add(e)
            for a in self.cells[e].attach:
                stack.extend(a.cells())
        return result

    def is_submodule(self, names: Iterable[Hashable]) -> bool:
        keep = set(names)
        return all(
            e in self.cells and all(a.cells() <= keep for a in self.cells[e].attach) for e in keep
        )

    def to_dict(self, encode: Callable[[Any], Any] = lambda n: n) -> dict:
        """Plain-data form; surjections are written as degeneracy words."""
        from .simplicial import DegeneracyWord

        def element(x: Element) -> list:
            return [
                [encode_coefficient(c), encode(e), list(DegeneracyWord.from_surjection(s).indices)]
                for (e, s), c in x.sorted_terms()
            ]

        return {
            "ring": self.ring.to_json(),
            "cells": [
                {"name": encode(e), "dim": c.dim, "attach": [element(a) for a in c.attach], "label": c.label}
                for e, c in self.cells.items()
            ],
        }


def encode_coefficient(c: Any) -> Any:
    return list(c) if isinstance(c, tuple) else c


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------


class ModuleMap:
    """A map of cellular modules given by the images of the source cells."""

    def __init__(
        self,
        source: CellularModule,
        target: CellularModule,
        images: Mapping[Hashable, Element],
        check: bool = True,
    ):
        self.source = source
        self.target = target
        self.images: dict[Hashable, Element] = dict(images)
        if check:
            self.check()

    def __repr__(self) -> str:
        return f"ModuleMap({self.source!r} -> {self.target!r})"

    def __call__(self, x: Element) -> Element:
        target = self.target
        return target.linear(x.degree, [(c, target.apply(self.images[e], s)) for (e, s), c in x.terms.items()])

    def on_cell(self, cell: Hashable) -> Element:
        return self.images[cell]

    def check(self) -> None:
        """Verify the map commutes with faces on every cell.

        Raises:
            WellDefinednessError: at the first violating (cell, face)
        """
        for e, c in self.source.cells.items():
            image = self.images.get(e)
            if image is None or image.degree != c.dim:
                raise WellDefinednessError(e, -1)
            for name in image.cells():
                if name not in self.target.cells:
                    raise WellDefinednessError(e, -1)
            for i, a in enumerate(c.attach):
                if self.target.face(image, i) != self(a):
                    raise WellDefinednessError(e, i)

    def is_well_defined(self) -> bool:
        try:
            self.check()
        except WellDefinednessError:
            return False
        return True

    def compose(self, first: "ModuleMap") -> "ModuleMap":
        """self after first."""
        return ModuleMap(first.source, self.target, {e: self(x) for e, x in first.images.items()}, check=False)

    def __matmul__(self, first: "ModuleMap") -> "ModuleMap":
        return self.compose(first)

    def add(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(
            self.source, self.target,
            {e: self.target.add(x, other.images[e]) for e, x in self.images.items()},
            check=False,
        )

    def sub(self, other: "ModuleMap") -> "ModuleMap":
        return ModuleMap(
            self.source, self.target,
            {e: self.target.sub(x, other.images[e]) for e, x in self.images.items()},
            check=False,
        )

    def neg(self) -> "ModuleMap":
        return ModuleMap(self.source, self.target, {e: self.target.neg(x) for e, x in self.images.items()}, check=False)

    def scale(self, coef: Any) -> "ModuleMap":
        return ModuleMap(self.source, self.target, {e: self.target.scale(coef, x) for e, x in self.images.items()}, check=False)

    def restrict(self, inclusion: "ModuleMap") -> "ModuleMap":
        """Restriction along a map into the source (usually an inclusion)."""
        return self.compose(inclusion)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ModuleMap) and self.images == other.images

    def first_difference(self, other: "ModuleMap") -> Optional[Hashable]:
        """First source cell where two maps differ, or None."""
        for e in self.source.cells:
            if self.images.get(e) != other.images.get(e):
                return e
        return None


def map_from_cells(source: CellularModule, target: CellularModule, images: Mapping[Hashable, Element]) -> ModuleMap:
    """Checked constructor for a map given on cells."""
    return ModuleMap(source, target, images, check=True)


def identity_map(M: CellularModule) -> ModuleMap:
    return ModuleMap(M, M, {e: M.top(e) for e in M.cells}, check=False)


def zero_map(M: CellularModule, N: CellularModule) -> ModuleMap:
    return ModuleMap(M, N, {e: N.zero(c.dim) for e, c in M.cells.items()}, check=False)


def inclusion_cells(f: ModuleMap) -> Optional[dict[Hashable, Hashable]]:
    """Cell correspondence of a cellular inclusion, or None if f is not one."""
    mapping: dict[Hashable, Hashable] = {}
    one = f.target.ring.one()
    for e, c in f.source.cells.items():
        x = f.images[e]
        if len(x.terms) != 1:
            return None
        ((name, surj), coef), = x.terms.items()
        if coef != one or surj != identity(c.dim) or f.target.label(name) != c.label:
            return None
        mapping[e] = name
    if len(set(mapping.values())) != len(mapping):
        return None
    return mapping


def is_cellular_inclusion(f: ModuleMap) -> bool:
    return inclusion_cells(f) is not None


def require_cellular_inclusion(f: ModuleMap) -> dict[Hashable, Hashable]:
    """Return the cell correspondence or raise CellularInclusionError."""
    mapping = inclusion_cells(f)
    if mapping is None:
        one = f.target.ring.one()
        seen: set = set()
        for e, c in f.source.cells.items():
            x = f.images[e]
            if len(x.terms) != 1:
                raise CellularInclusionError(e, "image is not a single cell")
            ((name, surj), coef), = x.terms.items()
            if coef != one or surj != identity(c.dim):
                raise CellularInclusionError(e, "image is not a nondegenerate cell with unit coefficient")
            if f.target.label(name) != c.label:
                raise CellularInclusionError(e, "label not preserved")
            if name in seen:
                raise CellularInclusionError(e, "two cells share an image")
            seen.add(name)
    return mapping


def modules_equal(M: CellularModule, N: CellularModule) -> bool:
    """Equal rings, cell names, dimensions, attaching data and labels."""
    return M.ring == N.ring and list(M.cells) == list(N.cells) and all(
        M.cells[e] == N.cells[e] for e in M.cells
    )


def modules_isomorphic_by_names(M: CellularModule, N: CellularModule) -> bool:
    """Equal as modules up to the order in which cells are listed."""
    return M.ring == N.ring and set(M.cells) == set(N.cells) and all(M.cells[e] == N.cells[e] for e in M.cells)


# ---------------------------------------------------------------------------
# Submodules and closures
# ---------------------------------------------------------------------------


def submodule(M: CellularModule, names: Iterable[Hashable]) -> tuple[CellularModule, ModuleMap]:
    """The cellular submodule on a closed set of cells and its inclusion.

    Raises:
        SubmoduleError: if the set is not closed under attaching data
    """
    keep = set(names)
    for e in keep:
        if e not in M.cells:
            raise SubmoduleError(e)
        for a in M.cells[e].attach:
            if not a.cells() <= keep:
                raise SubmoduleError(e)
    S = CellularModule(M.ring, {e: c for e, c in M.cells.items() if e in keep})
    return S, ModuleMap(S, M, {e: M.top(e) for e in S.cells}, check=False)


def cellular_closure(M: CellularModule, elements: Iterable[Element]) -> tuple[CellularModule, ModuleMap]:
    """Smallest cellular submodule containing the elements."""
    return submodule(M, M.closure_cells(elements))


# ---------------------------------------------------------------------------
# Tensoring with simplicial sets
# ---------------------------------------------------------------------------


class TensorModule(CellularModule):
    """M[X]: cells are (e, x, sigma, tau) with (sigma, tau) jointly injective."""

    def __init__(self, module: CellularModule, sset: FinSimplicialSet):
        super().__init__(module.ring)
        self.module = module
        self.sset = sset
        raw: list[tuple[int, Hashable]] = []
        for e, c in module.cells.items():
            for x, q in sset.dims.items():
                p = c.dim
                for m in range(max(p, q), p + q + 1):
                    for rep_e in combinations(range(m), m - p):
                        rest = [i for i in range(m) if i not in rep_e]
                        for rep_x in combinations(rest, m - q):
                            sigma = _from_repeats(m, rep_e)
                            tau = _from_repeats(m, rep_x)
                            raw.append((m, (e, x, sigma, tau)))
        raw.sort(key=lambda item: item[0])
        for m, name in raw:
            e, x, sigma, tau = name
            attach = tuple(
                self.tensor_element(
                    module.face(module.basis_element(e, sigma), j),
                    sset.face((x, tau), j),
                )
                for j in range(m + 1)
            ) if m > 0 else ()
            self.cells[name] = Cell(m, attach, module.label(e))

    def pair(self, e: Hashable, sigma: Monotone, x: Hashable, tau: Monotone) -> Basis:
        """Normal form of the basis element (e.sigma) (x) (x.tau)."""
        s, t, rho = common_collapse(sigma, tau)
        return ((e, x, s, t), rho)

    def tensor_element(self, element: Element, simplex: tuple[Hashable, Monotone]) -> Element:
        """element (x) simplex for an element of M and a simplex of X of equal degree."""
        x, tau = simplex
        terms: dict[Basis, Any] = {}
        for (e, sigma), c in element.terms.items():
            terms[self.pair(e, sigma, x, tau)] = c
        return Element(element.degree, terms)

    def cell_over(self, e: Hashable, x: Hashable) -> Hashable:
        """The top cell e x x (requires e or x to be a vertex)."""
        p, q = self.module.dim(e), self.sset.dims[x]
        if p == 0:
            return (e, x, (0,) * (q + 1), identity(q))
        if q == 0:
            return (e, x, identity(p), (0,) * (p + 1))
        raise ModuleError("cell_over needs a vertex factor")


def _from_repeats(n: int, rep: Iterable[int]) -> Monotone:
    from .simplicial import surjection_from_repeats

    return surjection_from_repeats(n, rep)


def tensor_sset(M: CellularModule, X: FinSimplicialSet) -> TensorModule:
    """M[X], cached per (M, X) pair."""
    hit = M._tensors.get(id(X))
    if hit is not None and hit[0] is X:
        return hit[1]
    MX = TensorModule(M, X)
    M._tensors[id(X)] = (X, MX)
    logger.debug("tensor built: %d cells x %d simplices -> %d cells", len(M), len(X), len(MX))
    return MX


def tensor_map(M: CellularModule, g: SSetMap) -> ModuleMap:
    """M[g]: M[X] -> M[Y] for a simplicial map g: X -> Y."""
    MX = tensor_sset(M, g.source)
    MY = tensor_sset(M, g.target)
    one = M.ring.one()
    images = {}
    for name, cell in MX.cells.items():
        e, x, sigma, tau = name
        y, tau2 = g((x, tau))
        images[name] = Element(cell.dim, {MY.pair(e, sigma, y, tau2): one})
    return ModuleMap(MX, MY, images, check=False)


def tensor_map_of_module_map(f: ModuleMap, X: FinSimplicialSet) -> ModuleMap:
    """f[X]: M[X] -> N[X]."""
    MX = tensor_sset(f.source, X)
    NX = tensor_sset(f.target, X)
    images = {}
    for name in MX.cells:
        e, x, sigma, tau = name
        images[name] = NX.tensor_element(f.target.apply(f.images[e], sigma), (x, tau))
    return ModuleMap(MX, NX, images, check=False)


def flatten(M: CellularModule, X: FinSimplicialSet, Y: FinSimplicialSet, P: FinSimplicialSet) -> tuple[ModuleMap, ModuleMap]:
    """The isomorphism M[X][Y] = M[X x Y] and its inverse.

    ``P`` must be the product ``simplicial.product(X, Y)[0]``.
    """
    MX = tensor_sset(M, X)
    MXY = tensor_sset(MX, Y)
    MP = tensor_sset(M, P)
    one = M.ring.one()
    forward = {}
    for name, cell in MXY.cells.items():
        (e, x, sigma, tau), y, alpha, beta = name
        s, t, rho = common_collapse(compose(tau, alpha), beta)
        forward[name] = Element(cell.dim, {MP.pair(e, compose(sigma, alpha), ((x, s), (y, t)), rho): one})
    backward = {}
    for name, cell in MP.cells.items():
        e, z, sigma, gamma = name
        (x, s), (y, t) = z
        inner, rho1 = MX.pair(e, sigma, x, compose(s, gamma))
        backward[name] = Element(cell.dim, {MXY.pair(inner, rho1, y, compose(t, gamma)): one})
    return ModuleMap(MXY, MP, forward, check=False), ModuleMap(MP, MXY, backward, check=False)


# ---------------------------------------------------------------------------
# Pushouts, quotients, coproducts
# ---------------------------------------------------------------------------


@dataclass
class Pushout:
    """D = B u_A C along a cellular inclusion i: A -> B and f: A -> C."""

    inclusion: ModuleMap
    f: ModuleMap
    D: CellularModule
    leg_C: ModuleMap
    leg_B: ModuleMap
    names: dict[Hashable, Hashable] = field(default_factory=dict)  # B cell outside A -> D cell
    origin: dict[Hashable, tuple[str, Hashable]] = field(default_factory=dict)

    def induced(self, g_C: ModuleMap, g_B: ModuleMap, check: bool = True) -> ModuleMap:
        """The unique g: D -> T with g . leg_C = g_C and g . leg_B = g_B.

        Raises:
            ModuleError: if g_C . f != g_B . i on some cell of A
        """
        if check:
            first = g_C.compose(self.f).first_difference(g_B.compose(self.inclusion))
            if first is not None:
                raise ModuleError(f"cocone does not commute on cell {first!r}")
        images = {}
        for d, (side, cell) in self.origin.items():
            images[d] = g_C.images[cell] if side == "C" else g_B.images[cell]
        return ModuleMap(self.D, g_C.target, images, check=False)


def pushout(i: ModuleMap, f: ModuleMap) -> Pushout:
    """Canonical pushout along a cellular inclusion.

    D has the cells of C (same names) followed by the cells of B outside A
    (B names, wrapped as ("B", name) on collision), with labels inherited.

    Raises:
        CellularInclusionError: if i is not a cellular inclusion
    """
    correspondence = require_cellular_inclusion(i)
    A, B, C = i.source, i.target, f.target
    if f.source is not A and list(f.source.cells) != list(A.cells):
        raise ModuleError("pushout legs have different sources")
    from_A = {b: a for a, b in correspondence.items()}
    cells: dict[Hashable, Cell] = dict(C.cells)
    origin: dict[Hashable, tuple[str, Hashable]] = {c: ("C", c) for c in C.cells}
    names: dict[Hashable, Hashable] = {}
    for b in B.skeletal_order():
        if b in from_A:
            continue
        d = b
        while d in cells:
            d = ("B", d)
        names[b] = d
        origin[d] = ("B", b)

    D = CellularModule(C.ring, {})

    def push(x: Element) -> Element:
        pieces = []
        for (b, s), coef in x.terms.items():
            if b in from_A:
                pieces.append((coef, C.apply(f.images[from_A[b]], s)))
            else:
                pieces.append((coef, Element(len(s) - 1, {(names[b], s): C.ring.one()})))
        return D.linear(x.degree, pieces)

    for b, d in names.items():
        cell = B.cells[b]
        cells[d] = Cell(cell.dim, tuple(push(a) for a in cell.attach), cell.label)
    D.cells = cells
    leg_C = ModuleMap(C, D, {c: D.top(c) for c in C.cells}, check=False)
    leg_B = ModuleMap(B, D, {b: push(B.top(b)) for b in B.cells}, check=False)
    logger.debug("pushout: |C|=%d, new cells=%d", len(C), len(names))
    return Pushout(i, f, D, leg_C, leg_B, names, origin)


@dataclass
class Quotient:
    """M/A with its projection."""

    module: CellularModule
    projection: ModuleMap
    sub: frozenset


def quotient(M: CellularModule, sub: Iterable[Hashable]) -> Quotient:
    """Quotient by a cellular submodule given by cell names (or a submodule).

    Raises:
        SubmoduleError: if the cells do not form a cellular submodule
    """
    killed = set(sub.cells) if isinstance(sub, CellularModule) else set(sub)
    submodule(M, killed)
    Q = CellularModule(M.ring, {})

    def drop(x: Element) -> Element:
        return Element(x.degree, {k: c for k, c in x.terms.items() if k[0] not in killed})

    Q.cells = {e: Cell(c.dim, tuple(drop(a) for a in c.attach), c.label) for e, c in M.cells.items() if e not in killed}
    proj = ModuleMap(M, Q, {e: Q.zero(c.dim) if e in killed else Q.top(e) for e, c in M.cells.items()}, check=False)
    return Quotient(Q, proj, frozenset(killed))


@dataclass
class Coproduct:
    """A v B with cells ("L", a) and ("R", b)."""

    module: CellularModule
    left: ModuleMap
    right: ModuleMap

    def copair(self, f: ModuleMap, g: ModuleMap) -> ModuleMap:
        images = {("L", a): f.images[a] for a in f.source.cells}
        images.update({("R", b): g.images[b] for b in g.source.cells})
        return ModuleMap(self.module, f.target, images, check=False)


def _retag(x: Element, tag: str) -> Element:
    return Element(x.degree, {((tag, e), s): c for (e, s), c in x.terms.items()})


def coproduct(A: CellularModule, B: CellularModule) -> Coproduct:
    if A.ring != B.ring:
        raise RingError("coproduct of modules over different rings")
    cells = {("L", a): Cell(c.dim, tuple(_retag(x, "L") for x in c.attach), c.label) for a, c in A.cells.items()}
    cells.update({("R", b): Cell(c.dim, tuple(_retag(x, "R") for x in c.attach), c.label) for b, c in B.cells.items()})
    S = CellularModule(A.ring, dict(sorted(cells.items(), key=lambda item: item[1].dim)))
    left = ModuleMap(A, S, {a: S.top(("L", a)) for a in A.cells}, check=False)
    right = ModuleMap(B, S, {b: S.top(("R", b)) for b in B.cells}, check=False)
    return Coproduct(S, left, right)


# ---------------------------------------------------------------------------
# Base change
# ---------------------------------------------------------------------------


def base_change(M: CellularModule, ring_map: RingMap, check: bool = True) -> CellularModule:
    """S (x)_R M: same cells and labels, coefficients pushed through the ring map.

    Raises:
        RingError: if the ring map fails the sampled homomorphism check
    """
    if ring_map.source != M.ring:
        raise RingError(f"ring map starts at {ring_map.source!r}, module is over {M.ring!r}")
    if check:
        ring_map.check_homomorphism()
    S = CellularModule(ring_map.target, {})
    S.cells = {
        e: Cell(c.dim, tuple(_push_coefficients(x, ring_map) for x in c.attach), c.label)
        for e, c in M.cells.items()
    }
    return S


def _push_coefficients(x: Element, ring_map: RingMap) -> Element:
    ring = ring_map.target
    terms = {k: ring.normalize(ring_map(c)) for k, c in x.terms.items()}
    return Element(x.degree, {k: c for k, c in terms.items() if not ring.is_zero(c)})


def base_change_map(f: ModuleMap, ring_map: RingMap, source: CellularModule, target: CellularModule) -> ModuleMap:
    """S (x)_R f between already base-changed source and target."""
    return ModuleMap(source, target, {e: _push_coefficients(x, ring_map) for e, x in f.images.items()}, check=False)


# ---------------------------------------------------------------------------
# Hom simplices and the adjunction
# ---------------------------------------------------------------------------


@dataclass
class HomSimplices:
    """Generators of Hom(M[Delta^k], N); ``complete`` is False when bounded."""

    k: int
    maps: list[ModuleMap]
    complete: bool = True
    unknowns: int = 0


def hom_simplices(M: CellularModule, N: CellularModule, k: int, bound: Optional[int] = None) -> HomSimplices:
    """Solve the well-definedness equations for maps M[Delta^k] -> N.

    Unknowns are the ring coordinates of the images of the cells of
    M[Delta^k] in the basis of N.  When more than ``bound`` unknowns would be
    needed only the first ``bound`` are freed and the result is flagged
    partial (it then spans a subgroup of the solutions).
    The bound defaults to the configured `hom_bound`.
    """
    from .simplicial import standard_simplex
    from .snf import kernel_basis, kernel_generators_mod

    if bound is None:
        bound = get_config().hom_bound
    if M.ring != N.ring:
        raise RingError("hom between modules over different rings")
    ring = N.ring
    source = tensor_sset(M, standard_simplex(k))
    unknowns: list[tuple[Hashable, Basis, int]] = []
    for e, c in source.cells.items():
        for b in N.basis(c.dim):
            for t in range(ring.rank):
                unknowns.append((e, b, t))
    complete = True
    if bound is not None and len(unknowns) > bound:
        logger.warning("hom_simplices: %d unknowns exceed bound %d; partial result", len(unknowns), bound)
        unknowns = unknowns[:bound]
        complete = False

    def unit_map(index: int) -> ModuleMap:
        e, b, t = unknowns[index]
        coords = [1 if s == t else 0 for s in range(ring.rank)]
        images = {name: N.zero(c.dim) for name, c in source.cells.items()}
        images[e] = N.basis_element(b[0], b[1], ring.from_coordinates(coords))
        return ModuleMap(source, N, images, check=False)

    rows_index: dict[tuple, int] = {}
    columns: list[dict[int, int]] = []
    for index in range(len(unknowns)):
        f = unit_map(index)
        column: dict[int, int] = {}
        for e, c in source.cells.items():
            for i, a in enumerate(c.attach):
                defect = N.sub(N.face(f.images[e], i), f(a))
                for key, coef in defect.terms.items():
                    for t, v in enumerate(ring.coordinates(coef)):
                        if v:
                            row = rows_index.setdefault((e, i, key, t), len(rows_index))
                            column[row] = column.get(row, 0) + v
        columns.append(column)
    matrix = [[columns[j].get(r, 0) for j in range(len(unknowns))] for r in range(len(rows_index))]
    if ring.coordinate_modulus is None:
        vectors = kernel_basis(matrix, len(unknowns))
    else:
        vectors = kernel_generators_mod(matrix, len(unknowns), ring.coordinate_modulus)

    maps = []
    for vec in vectors:
        images = {name: N.zero(c.dim) for name, c in source.cells.items()}
        grouped: dict[tuple[Hashable, Basis], list[int]] = {}
        for value, (e, b, t) in zip(vec, unknowns):
            grouped.setdefault((e, b), [0] * ring.rank)[t] = value
        for (e, b), coords in grouped.items():
            images[e] = N.add(images[e], N.basis_element(b[0], b[1], ring.from_coordinates(coords)))
        maps.append(ModuleMap(source, N, images, check=False))
    logger.debug("hom_simplices: k=%d unknowns=%d generators=%d", k, len(unknowns), len(maps))
    return HomSimplices(k, maps, complete, len(unknowns))


def adjoint(f: ModuleMap, M: CellularModule, X: FinSimplicialSet) -> dict[Hashable, ModuleMap]:
    """Hom(M[X], N) -> Hom_sSet(X, HOM(M, N)): x |-> f . M[char_x]."""
    from .simplicial import characteristic_map

    return {x: f.compose(tensor_map(M, characteristic_map(X, x))) for x in X.dims}


def adjoint_inverse(phi: Mapping[Hashable, ModuleMap], M: CellularModule, X: FinSimplicialSet, N: CellularModule) -> ModuleMap:
    """Inverse of :func:`adjoint`: the cell (e, x, sigma, tau) goes to phi_x on (e, top, sigma, tau)."""
    MX = tensor_sset(M, X)
    images = {}
    for name in MX.cells:
        e, x, sigma, tau = name
        top = tuple(range(X.dims[x] + 1))
        images[name] = phi[x].images[(e, top, sigma, tau)]
    return ModuleMap(MX, N, images, check=False)


# ---------------------------------------------------------------------------
# Builders used by tests, scenarios and the workbench
# ---------------------------------------------------------------------------


def simplex_module(ring: Ring, X: FinSimplicialSet, label: Any = None) -> CellularModule:
    """R[X] with every cell labeled ``label``."""
    M = CellularModule(ring, {})
    one = ring.one()
    for x, k in sorted(X.dims.items(), key=lambda item: item[1]):
        attach = tuple(Element(k - 1, {X.faces[x][j]: one}) for j in range(k + 1)) if k > 0 else ()
        M.cells[x] = Cell(k, attach, label)
    return M


def point_module(ring: Optional[Ring] = None, name: Hashable = "*", label: Any = None) -> CellularModule:
    """R[Delta^0] with a single 0-cell."""
    return CellularModule(ring or IntegerRing(), {name: Cell(0, (), label)})


def random_module(
    ring: Ring,
    rng: Optional[random.Random] = None,
    vertices: int = 3,
    edges: int = 3,
    triangles: int = 1,
    labels: Optional[Callable[[random.Random], Any]] = None,
) -> CellularModule:
    """Random cellular module of dimension <= 2.

    Each edge joins two random vertices.  A 2-cell is attached with
    d_0 = b, d_1 = a + b - s_0(end) and d_2 = a, where the edge b starts at
    the end of a (or is degenerate there), so the boundary identities hold
    by construction.
    Without ``rng`` the generator is seeded from the configured `seed`.
    """
    rng = rng or random.Random(get_config().seed)
    pick = labels or (lambda r: None)
    M = CellularModule(ring)
    for v in range(vertices):
        M = M.attach_cell(f"v{v}", 0, (), pick(rng))
    one = ring.one()
    vertex_names = [f"v{v}" for v in range(vertices)]
    edge_names: list[str] = []
    for k in range(edges):
        ends = []
        for _ in range(2):
            u = rng.choice(vertex_names)
            ends.append(M.basis_element(u, (0,), one))
        M = M.attach_cell(f"e{k}", 1, tuple(ends), pick(rng))
        edge_names.append(f"e{k}")
    for t in range(triangles if edge_names else 0):
        a = M.top(rng.choice(edge_names))
        end = M.face(a, 0)
        # d_0 must start where a ends
        continuing = [M.top(e) for e in edge_names if M.face(M.top(e), 1) == end]
        b = rng.choice(continuing) if continuing and rng.random() < 0.7 else M.degeneracy(end, 0)
        d1 = M.sub(M.add(a, b), M.degeneracy(end, 0))
        M = M.attach_cell(f"t{t}", 2, (b, d1, a), pick(rng))
    return M
