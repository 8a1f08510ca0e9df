"""Homotopies, horn filling, lifting and deformation retractions.

A homotopy from f to g (maps A -> B) is a map H: A[Delta^1] -> B with
H . i_0 = f and H . i_1 = g.  New homotopies come from filling horns:
symmetry fills a 2-horn at vertex 0, transitivity one at vertex 1.  Every
construction checks its own contract on cells before it returns.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

from .control import Certificate, Condition, ControlSpace, check_map
from .exceptions import (
    CertificateSoundnessError,
    ControlViolation,
    HomotopyError,
    ModuleError,
    OverlapError,
    SquareError,
    WellDefinednessError,
    WitnessError,
)
from .logging_config import get_logger
from .modules import (
    CellularModule,
    Element,
    ModuleMap,
    Pushout,
    Quotient,
    coproduct,
    flatten,
    identity_map,
    inclusion_cells,
    pushout,
    require_cellular_inclusion,
    tensor_map,
    tensor_map_of_module_map,
    tensor_sset,
)
from .simplicial import (
    FinSimplicialSet,
    SSetMap,
    operator_map,
    product,
    product_vertex,
    standard_simplex,
    vertex_function_map,
)

logger = get_logger("homotopy")

Images = dict[Hashable, Element]
Solver = Callable[[Hashable, int, int, Images], Element]


# ---------------------------------------------------------------------------
# Small helpers
# ---------------------------------------------------------------------------


def delta(n: int) -> FinSimplicialSet:
    return standard_simplex(n)


@lru_cache(maxsize=None)
def square() -> tuple[FinSimplicialSet, SSetMap, SSetMap]:
    """Delta^1 x Delta^1 with its projections; the first factor is the u-coordinate."""
    return product(standard_simplex(1), standard_simplex(1))


def square_vertex(u: int, t: int) -> Hashable:
    return product_vertex((u,), (t,))


def vertex_inclusion(A: CellularModule, X: FinSimplicialSet, v: Hashable) -> ModuleMap:
    """A -> A[X] onto the vertex v."""
    AX = tensor_sset(A, X)
    return ModuleMap(A, AX, {e: AX.top(AX.cell_over(e, v)) for e in A.cells}, check=False)


def projection(A: CellularModule, X: FinSimplicialSet) -> ModuleMap:
    """A[X] -> A induced by X -> Delta^0."""
    AX = tensor_sset(A, X)
    return ModuleMap(AX, A, {name: A.basis_element(name[0], name[2]) for name in AX.cells}, check=False)


def along(F: ModuleMap, g: SSetMap) -> ModuleMap:
    """F . A[g] for F: A[X] -> P and g: Y -> X."""
    return F.compose(tensor_map(F.source.module, g))


def edge(F: ModuleMap, a: int, b: int, n: int) -> ModuleMap:
    """Restriction of F: A[Delta^n] -> P to the edge (a, b)."""
    return along(F, operator_map((a, b), n))


def require_equal(equation: str, left: ModuleMap, right: ModuleMap) -> None:
    cell = left.first_difference(right)
    if cell is not None:
        raise WitnessError(equation, cell)


def _merge(known: Images, more: Mapping[Hashable, Element]) -> None:
    for name, value in more.items():
        if name in known and known[name] != value:
            raise OverlapError(name)
        known[name] = value


def _pull(images: Mapping[Hashable, Element], vertices: Sequence[Hashable], X: Optional[FinSimplicialSet] = None) -> Images:
    """Values given over Delta^q renamed onto the face spanned by ``vertices``.

    Without X the target is a standard simplex and vertices are integers.
    """
    if X is None:
        def rename(x: tuple) -> Hashable:
            return tuple(vertices[v] for v in x)
    else:
        def rename(x: tuple) -> Hashable:
            return X.simplex_from_vertices(vertices[v] for v in x)[0]
    return {(e, rename(x), s, t): value for (e, x, s, t), value in images.items()}


def _constant_on(f: ModuleMap, cells: Iterable[Hashable], X: FinSimplicialSet) -> Images:
    """Values of f . projection on the cells of A[X] over ``cells``."""
    keep = set(cells)
    MX = tensor_sset(f.source, X)
    return {
        name: f.target.apply(f.images[name[0]], name[2])
        for name in MX.cells
        if name[0] in keep
    }


def _evaluate(P: CellularModule, images: Mapping[Hashable, Element], x: Element) -> Element:
    pieces = []
    for (e, s), c in x.terms.items():
        value = images.get(e)
        if value is None:
            raise HomotopyError(f"value on {e!r} needed before it was built")
        pieces.append((c, P.apply(value, s)))
    return P.linear(x.degree, pieces)


def _certify(operation: str, F: ModuleMap, space: ControlSpace, condition: Condition) -> Certificate:
    try:
        return check_map(F, space, condition)
    except ControlViolation as err:
        logger.error("%s: control bound violated: %s", operation, err)
        raise CertificateSoundnessError(operation, err) from err


def image_cells(inclusion: ModuleMap) -> set[Hashable]:
    """Target names of a cellular inclusion."""
    return set(require_cellular_inclusion(inclusion).values())


def corestrict(f: ModuleMap, inclusion: ModuleMap) -> Optional[ModuleMap]:
    """f as a map into the source of a cellular inclusion, or None if it leaves it."""
    back = {b: a for a, b in require_cellular_inclusion(inclusion).items()}
    images = {}
    for e, x in f.images.items():
        if not x.cells() <= back.keys():
            return None
        images[e] = Element(x.degree, {(back[b], s): c for (b, s), c in x.terms.items()})
    return ModuleMap(f.source, inclusion.source, images, check=False)


# ---------------------------------------------------------------------------
# Kan filling
# ---------------------------------------------------------------------------


def kan_fill_elements(P: CellularModule, m: int, j: int, faces: Mapping[int, Element], check: bool = False) -> Element:
    """Fill the horn (y_i)_{i != j} of degree m - 1 elements to w with d_i w = y_i.

    The classical filler for simplicial groups: correct by s_r below j in
    increasing order, then by s_{r-1} above j in decreasing order.

    Raises:
        HomotopyError: if ``check`` is set and the faces are incompatible
    """
    if check:
        for k in range(1, m + 1):
            for i in range(k):
                if j in (i, k):
                    continue
                if P.face(faces[k], i) != P.face(faces[i], k - 1):
                    raise HomotopyError(f"horn faces {i} and {k} are incompatible")
    w = P.zero(m)
    for r in range(j):
        w = P.add(w, P.degeneracy(P.sub(faces[r], P.face(w, r)), r))
    for r in range(m, j, -1):
        w = P.add(w, P.degeneracy(P.sub(faces[r], P.face(w, r)), r - 1))
    return w


def _corner(chain: tuple, k: int) -> tuple[tuple[int, int], int]:
    """The point whose presence pairs a cell with one of its faces, and a sort key."""
    if k > 0:
        a = [p for p, t in chain if t < k][-1]
        return (a, k), a
    b = next(p for p, t in chain if t == 1)
    return (b, 0), -b


def _fill_cells(
    M: CellularModule,
    fixed: set,
    n: int,
    k: int,
    known: Mapping[Hashable, Element],
    P: CellularModule,
    solver: Optional[Solver] = None,
) -> ModuleMap:
    """Extend values on M[Lambda^n_k] u fixed[Delta^n] to M[Delta^n] -> P.

    Over a p-cell e the cells of M[Delta^n] are chains in [p] x [n].  The
    unknown ones come in pairs (y, d_j y) where y contains a corner point;
    y is filled as a horn at j and its partner is read off as d_j.
    """
    if solver is None:
        def solver(y: Hashable, m: int, j: int, faces: Images) -> Element:
            return kan_fill_elements(P, m, j, faces)
    MX = tensor_sset(M, standard_simplex(n))
    full = tuple(range(n + 1))
    missing = full[:k] + full[k + 1:]
    images: Images = dict(known)
    groups: dict[Hashable, list] = {}
    for name in MX.cells:
        if name[0] not in fixed and name[1] in (full, missing):
            groups.setdefault(name[0], []).append(name)
    for e in M.skeletal_order():
        pairs = []
        for name in groups.get(e, ()):
            _, x, sigma, tau = name
            chain = tuple((sigma[i], x[tau[i]]) for i in range(len(sigma)))
            corner, key = _corner(chain, k)
            if corner in chain:
                pairs.append((len(chain), key, name, chain.index(corner)))
        pairs.sort(key=lambda item: (item[0], item[1]))
        for _, _, y, j in pairs:
            cell = MX.cells[y]
            faces = {i: _evaluate(P, images, a) for i, a in enumerate(cell.attach) if i != j}
            z = solver(y, cell.dim, j, faces)
            images[y] = z
            partner = cell.attach[j]
            if len(partner.terms) != 1:
                raise HomotopyError(f"face {j} of {y!r} is not a single cell")
            ((x_name, _), _), = partner.terms.items()
            images[x_name] = P.face(z, j)
    absent = [name for name in MX.cells if name not in images]
    if absent:
        raise HomotopyError(f"horn data does not cover {absent[0]!r}")
    return ModuleMap(MX, P, images, check=True)


@dataclass
class FillResult:
    """A filled map with its control certificate when one was requested."""

    map: ModuleMap
    certificate: Optional[Certificate] = None


def _horn_known(inclusion: Optional[ModuleMap], g: Optional[ModuleMap], h: ModuleMap) -> tuple[set, Images]:
    known: Images = dict(h.images)
    if inclusion is None:
        return set(), known
    corr = require_cellular_inclusion(inclusion)
    if g is not None:
        for (a, x, s, t), value in g.images.items():
            name = (corr[a], x, s, t)
            if name in known and known[name] != value:
                raise OverlapError(name, "horn map and simplex map disagree")
            known[name] = value
    return set(corr.values()), known


def relative_horn_fill(
    inclusion: Optional[ModuleMap],
    g: Optional[ModuleMap],
    h: ModuleMap,
    n: int,
    k: int,
    space: Optional[ControlSpace] = None,
    E_M: Optional[Condition] = None,
    E_f: Optional[Condition] = None,
) -> FillResult:
    """Extend g: A[Delta^n] -> P and h: M[Lambda^n_k] -> P to M[Delta^n] -> P.

    Args:
        inclusion: cellular inclusion A -> M (None for A = 0)
        g: map on A[Delta^n]
        h: map on M[Lambda^n_k]
        space, E_M, E_f: when given, the result is certified at E_f . E_M

    Raises:
        OverlapError: if g and h disagree on A[Lambda^n_k]
        CertificateSoundnessError: if the control bound fails its re-check
    """
    M = h.source.module
    fixed, known = _horn_known(inclusion, g, h)
    F = _fill_cells(M, fixed, n, k, known, h.target)
    certificate = None
    if space is not None and E_M is not None and E_f is not None:
        certificate = _certify("relative_horn_fill", F, space, space.compose_conditions(E_M, E_f))
    logger.debug("filled horn (%d, %d) over %d cells", n, k, len(M))
    return FillResult(F, certificate)


def kan_fill(h: ModuleMap, n: int, k: int) -> ModuleMap:
    """Fill a horn M[Lambda^n_k] -> P to M[Delta^n] -> P."""
    return relative_horn_fill(None, None, h, n, k).map


def lift_element(quotient: Quotient, m: int, j: int, faces: Mapping[int, Element], target: Element) -> Element:
    """w in P with d_i w = faces[i] for i != j and w = target in P/U.

    Starts from the same-named cells of P and corrects the faces by a horn
    filling inside U.
    """
    P = quotient.projection.source
    start = Element(m, dict(target.terms))
    corrections = {i: P.sub(v, P.face(start, i)) for i, v in faces.items()}
    return P.add(start, kan_fill_elements(P, m, j, corrections))


def relative_lift(
    inclusion: Optional[ModuleMap],
    g: Optional[ModuleMap],
    h: ModuleMap,
    bottom: ModuleMap,
    quotient: Quotient,
    n: int,
    k: int,
    space: Optional[ControlSpace] = None,
    conditions: Optional[Mapping[str, Condition]] = None,
) -> FillResult:
    """Diagonal lift for M[Lambda^n_k] u A[Delta^n] -> P over M[Delta^n] -> P/U.

    Each new cell starts from the same-named cell of P above its image in
    P/U; the faces are then corrected by a horn filling inside U.

    Args:
        conditions: E_M, E_f, E_h and E_P; the lift is certified at
            E_f . E_M u E_M . E_h . E_P

    Raises:
        SquareError: if the top data does not project to the bottom map
    """
    P = quotient.projection.source
    M = h.source.module
    fixed, known = _horn_known(inclusion, g, h)
    for name, value in known.items():
        if quotient.projection(value) != bottom.images[name]:
            raise SquareError(name)

    def solver(y: Hashable, m: int, j: int, faces: Images) -> Element:
        return lift_element(quotient, m, j, faces, bottom.images[y])

    F = _fill_cells(M, fixed, n, k, known, P, solver)
    cell = quotient.projection.compose(F).first_difference(bottom)
    if cell is not None:
        raise SquareError(cell)
    certificate = None
    if space is not None and conditions:
        c = conditions
        bound = space.union_conditions(
            space.compose_conditions(c["E_M"], c["E_f"]),
            space.compose_conditions(space.compose_conditions(c["E_P"], c["E_h"]), c["E_M"]),
        )
        certificate = _certify("relative_lift", F, space, bound)
    return FillResult(F, certificate)


def extend_over(
    M: CellularModule,
    X: FinSimplicialSet,
    fixed: Iterable[Hashable],
    known: Mapping[Hashable, Element],
    steps: Sequence[tuple[Hashable, int]],
    P: CellularModule,
    solver: Optional[Solver] = None,
) -> ModuleMap:
    """Extend values on M[X] by filling the listed simplices of X in order.

    Each step (y, k) fills the nondegenerate simplex y of the vertex-determined
    set X as a horn at its k-th vertex, relative to the ``fixed`` cells of M.

    Raises:
        OverlapError: if a fill disagrees with values already present
        HomotopyError: if some cell of M[X] is still undefined at the end
    """
    fixed = set(fixed)
    images: Images = dict(known)
    for y, k in steps:
        verts = X.vertex_sequence(y)
        d = X.dims[y]
        full = tuple(range(d + 1))
        missing = full[:k] + full[k + 1:]
        rename = {
            name: (name[0], X.simplex_from_vertices(verts[v] for v in name[1])[0], name[2], name[3])
            for name in tensor_sset(M, standard_simplex(d)).cells
        }
        local = {
            md: images[mx]
            for md, mx in rename.items()
            if mx in images and (md[0] in fixed or md[1] not in (full, missing))
        }
        F = _fill_cells(M, fixed, d, k, local, P, solver)
        for md, mx in rename.items():
            value = F.images[md]
            if mx in images and images[mx] != value:
                raise OverlapError(mx, "filled simplex disagrees with earlier values")
            images[mx] = value
    MX = tensor_sset(M, X)
    absent = [name for name in MX.cells if name not in images]
    if absent:
        raise HomotopyError(f"no value on {absent[0]!r}")
    return ModuleMap(MX, P, images, check=True)


def assemble_over(M: CellularModule, X: FinSimplicialSet, pieces: Mapping[Hashable, ModuleMap]) -> ModuleMap:
    """Glue maps M[Delta^d] -> P given per nondegenerate simplex of X.

    Raises:
        OverlapError: if two pieces disagree on a shared face
        HomotopyError: if the pieces do not cover M[X]
    """
    images: Images = {}
    target = None
    for y, F in pieces.items():
        target = F.target
        _merge(images, _pull(F.images, X.vertex_sequence(y), X))
    MX = tensor_sset(M, X)
    absent = [name for name in MX.cells if name not in images]
    if absent or target is None:
        raise HomotopyError(f"pieces do not cover {absent[0] if absent else 'anything'!r}")
    return ModuleMap(MX, target, images, check=True)


# ---------------------------------------------------------------------------
# Homotopies
# ---------------------------------------------------------------------------


class Homotopy:
    """A homotopy given by its carrier A[Delta^1] -> B."""

    def __init__(self, carrier: ModuleMap):
        self.carrier = carrier
        self.source: CellularModule = carrier.source.module
        self.target: CellularModule = carrier.target

    def __repr__(self) -> str:
        return f"Homotopy({self.source!r} -> {self.target!r})"

    @property
    def start(self) -> ModuleMap:
        return self.carrier.compose(vertex_inclusion(self.source, delta(1), (0,)))

    @property
    def end(self) -> ModuleMap:
        return self.carrier.compose(vertex_inclusion(self.source, delta(1), (1,)))

    def relative_defect(self, cells: Iterable[Hashable]) -> Optional[Hashable]:
        """First cell of A[Delta^1] over ``cells`` where H is not constant."""
        keep = set(cells)
        f = self.start
        for name, value in self.carrier.images.items():
            if name[0] in keep and value != self.target.apply(f.images[name[0]], name[2]):
                return name
        return None

    def verify(
        self,
        start: Optional[ModuleMap] = None,
        end: Optional[ModuleMap] = None,
        rel: Iterable[Hashable] = (),
    ) -> "Homotopy":
        """Check the carrier, the endpoints and relativity.

        Raises:
            WellDefinednessError: if the carrier is not a map
            WitnessError: naming the failing endpoint or the first moving cell
        """
        self.carrier.check()
        if start is not None:
            require_equal("H(0) = start", self.start, start)
        if end is not None:
            require_equal("H(1) = end", self.end, end)
        cell = self.relative_defect(rel)
        if cell is not None:
            raise WitnessError("H constant on the subcomplex", cell)
        return self


def trivial(f: ModuleMap) -> Homotopy:
    """The constant homotopy Tr(f) = f . projection."""
    return Homotopy(f.compose(projection(f.source, delta(1))))


def whisker(H: Homotopy, pre: Optional[ModuleMap] = None, post: Optional[ModuleMap] = None) -> Homotopy:
    """post . H . pre[Delta^1]."""
    carrier = H.carrier
    if pre is not None:
        carrier = carrier.compose(tensor_map_of_module_map(pre, delta(1)))
    if post is not None:
        carrier = post.compose(carrier)
    return Homotopy(carrier)


def homotopy_sum(H1: Homotopy, H2: Homotopy) -> Homotopy:
    """H1 + H2, a homotopy from f1 + f2 to g1 + g2."""
    return Homotopy(H1.carrier.add(H2.carrier))


def reverse_with_filler(H: Homotopy, rel: Iterable[Hashable] = ()) -> tuple[Homotopy, ModuleMap]:
    """Fill the 2-horn at vertex 0 with faces (0,1) = H and (0,2) = Tr.

    Returns the reversed homotopy (the (1,2) face) and the filled 2-simplex.
    """
    rel = set(rel)
    f = H.start
    known: Images = {}
    _merge(known, _pull(H.carrier.images, (0, 1)))
    _merge(known, _pull(trivial(f).carrier.images, (0, 2)))
    _merge(known, _constant_on(f, rel, delta(2)))
    Z = _fill_cells(H.source, rel, 2, 0, known, H.target)
    return Homotopy(edge(Z, 1, 2, 2)), Z


def reverse(H: Homotopy, rel: Iterable[Hashable] = ()) -> Homotopy:
    """A homotopy from H(1) to H(0), constant on ``rel`` when H is."""
    return reverse_with_filler(H, rel)[0]


def concat(H1: Homotopy, H2: Homotopy, rel: Iterable[Hashable] = ()) -> Homotopy:
    """Fill the 2-horn at vertex 1 with faces (0,1) = H1 and (1,2) = H2.

    Raises:
        OverlapError: if H1 does not end where H2 starts
    """
    rel = set(rel)
    known: Images = {}
    _merge(known, _pull(H1.carrier.images, (0, 1)))
    _merge(known, _pull(H2.carrier.images, (1, 2)))
    _merge(known, _constant_on(H1.start, rel, delta(2)))
    Z = _fill_cells(H1.source, rel, 2, 1, known, H1.target)
    return Homotopy(edge(Z, 0, 2, 2))


def concat_many(homotopies: Sequence[Homotopy], rel: Iterable[Hashable] = ()) -> Homotopy:
    rel = set(rel)
    result = homotopies[0]
    for H in homotopies[1:]:
        result = concat(result, H, rel)
    return result


# ---------------------------------------------------------------------------
# Equivalences, deformations and cofibrations
# ---------------------------------------------------------------------------


@dataclass
class EquivalenceWitness:
    """f with a homotopy inverse g and homotopies g.f -> id, f.g -> id."""

    forward: ModuleMap
    inverse: ModuleMap
    left: Homotopy
    right: Homotopy

    def verify(self) -> "EquivalenceWitness":
        """Check all four pieces on cells.

        Raises:
            WitnessError: naming the first broken equation
        """
        f, g = self.forward, self.inverse
        for label, m in (("f", f), ("g", g), ("left", self.left.carrier), ("right", self.right.carrier)):
            try:
                m.check()
            except WellDefinednessError as err:
                raise WitnessError(f"{label} is a map", err.cell) from err
        require_equal("left(0) = g.f", self.left.start, g.compose(f))
        require_equal("left(1) = id", self.left.end, identity_map(f.source))
        require_equal("right(0) = f.g", self.right.start, f.compose(g))
        require_equal("right(1) = id", self.right.end, identity_map(f.target))
        return self


def verify_equivalence(w: EquivalenceWitness) -> bool:
    try:
        w.verify()
    except WitnessError as err:
        logger.info("equivalence witness rejected: %s", err)
        return False
    return True


def identity_witness(M: CellularModule) -> EquivalenceWitness:
    ident = identity_map(M)
    return EquivalenceWitness(ident, ident, trivial(ident), trivial(ident))


def isomorphism_witness(f: ModuleMap, g: ModuleMap) -> EquivalenceWitness:
    """Witness for mutually inverse maps.

    Raises:
        WitnessError: if g is not inverse to f
    """
    require_equal("g.f = id", g.compose(f), identity_map(f.source))
    require_equal("f.g = id", f.compose(g), identity_map(f.target))
    return EquivalenceWitness(f, g, trivial(identity_map(f.source)), trivial(identity_map(f.target)))


@dataclass
class DeformationData:
    """A >-> X with r: X -> A, r.i = id, and a homotopy i.r -> id relative to A."""

    inclusion: ModuleMap
    retraction: ModuleMap
    homotopy: Homotopy

    @property
    def sub(self) -> set:
        return image_cells(self.inclusion)

    def verify(self) -> "DeformationData":
        """Raises WitnessError on the first failing part of the contract."""
        i, r = self.inclusion, self.retraction
        if inclusion_cells(i) is None:
            raise WitnessError("inclusion is cellular")
        require_equal("r.i = id", r.compose(i), identity_map(i.source))
        self.homotopy.verify(i.compose(r), identity_map(i.target), self.sub)
        return self

    def witness(self) -> EquivalenceWitness:
        return EquivalenceWitness(
            self.inclusion, self.retraction, trivial(identity_map(self.inclusion.source)), self.homotopy
        )


@dataclass
class CofibrationWitness:
    """Isomorphisms alpha: A' -> A and beta: B -> B' with beta.f.alpha a cellular inclusion."""

    map: ModuleMap
    alpha: ModuleMap
    beta: ModuleMap

    @property
    def inclusion(self) -> ModuleMap:
        return self.beta.compose(self.map).compose(self.alpha)

    def verify(self) -> "CofibrationWitness":
        require_cellular_inclusion(self.inclusion)
        return self


def cofibration_witness(f: ModuleMap) -> CofibrationWitness:
    """The witness with identity isomorphisms (f must already be a cellular inclusion)."""
    return CofibrationWitness(f, identity_map(f.source), identity_map(f.target)).verify()


def saturation_compose(
    f: ModuleMap,
    g: ModuleMap,
    w_f: Optional[EquivalenceWitness] = None,
    w_g: Optional[EquivalenceWitness] = None,
    w_gf: Optional[EquivalenceWitness] = None,
) -> EquivalenceWitness:
    """Given witnesses for two of f, g and g.f, build one for the third.

    Raises:
        WitnessError: if fewer than two witnesses are given, a witness is
            for the wrong map, or the derived witness fails verification
    """
    gf = g.compose(f)
    for name, w, m in (("f", w_f, f), ("g", w_g, g), ("g.f", w_gf, gf)):
        if w is not None:
            require_equal(f"witness is for {name}", w.forward, m)
    if w_f is not None and w_g is not None:
        fi, gi = w_f.inverse, w_g.inverse
        left = concat(whisker(w_g.left, pre=f, post=fi), w_f.left)
        right = concat(whisker(w_f.right, pre=gi, post=g), w_g.right)
        result = EquivalenceWitness(gf, fi.compose(gi), left, right)
    elif w_f is not None and w_gf is not None:
        fi, ki = w_f.inverse, w_gf.inverse
        inverse = f.compose(ki)
        left = concat_many([
            whisker(reverse(w_f.right), pre=None, post=f.compose(ki).compose(g)),
            whisker(w_gf.left, pre=fi, post=f),
            w_f.right,
        ])
        result = EquivalenceWitness(g, inverse, left, w_gf.right)
    elif w_g is not None and w_gf is not None:
        gi, ki = w_g.inverse, w_gf.inverse
        inverse = ki.compose(g)
        right = concat_many([
            whisker(reverse(w_g.left), pre=f.compose(ki).compose(g)),
            whisker(w_gf.right, pre=g, post=gi),
            w_g.left,
        ])
        result = EquivalenceWitness(f, inverse, w_gf.left, right)
    else:
        raise WitnessError("two of the three witnesses are required")
    return result.verify()


# ---------------------------------------------------------------------------
# Cylinders
# ---------------------------------------------------------------------------


@dataclass
class Cylinder:
    module: CellularModule
    i0: ModuleMap
    i1: ModuleMap
    p: ModuleMap


def cylinder(M: CellularModule) -> Cylinder:
    """M[Delta^1] with its end inclusions and projection."""
    X = delta(1)
    return Cylinder(tensor_sset(M, X), vertex_inclusion(M, X, (0,)), vertex_inclusion(M, X, (1,)), projection(M, X))


@dataclass
class MappingCylinder:
    """T(f) = A[Delta^1] u_{A[1]} B with front, back and projection."""

    f: ModuleMap
    module: CellularModule
    front: ModuleMap
    back: ModuleMap
    projection: ModuleMap
    po: Pushout
    cylinder: Cylinder

    def check_axioms(self) -> None:
        """A v B >-> T(f) is a cellular inclusion and the triangle commutes.

        Raises:
            CellularInclusionError: if the front/back pair is not cellular
            WitnessError: if p . front != f or p . back != id
        """
        A, B = self.f.source, self.f.target
        both = coproduct(A, B)
        require_cellular_inclusion(both.copair(self.front, self.back))
        require_equal("p . front = f", self.projection.compose(self.front), self.f)
        require_equal("p . back = id", self.projection.compose(self.back), identity_map(B))


def mapping_cylinder(f: ModuleMap) -> MappingCylinder:
    A, B = f.source, f.target
    cyl = cylinder(A)
    po = pushout(cyl.i1, f)
    front = po.leg_B.compose(cyl.i0)
    proj = po.induced(identity_map(B), f.compose(cyl.p))
    return MappingCylinder(f, po.D, front, po.leg_C, proj, po, cyl)


def mapping_cylinder_map(Tf: MappingCylinder, Tg: MappingCylinder, top: ModuleMap, bottom: ModuleMap) -> ModuleMap:
    """T(f) -> T(g) for a strictly commuting square g . top = bottom . f.

    Raises:
        SquareError: if the square does not commute
    """
    cell = Tg.f.compose(top).first_difference(bottom.compose(Tf.f))
    if cell is not None:
        raise SquareError(cell)
    return Tf.po.induced(Tg.back.compose(bottom), Tg.po.leg_B.compose(tensor_map_of_module_map(top, delta(1))))


def tensor_induced(po: Pushout, X: FinSimplicialSet, F_C: ModuleMap, F_B: ModuleMap, check: bool = True) -> ModuleMap:
    """D[X] -> P from maps on C[X] and B[X] agreeing on A[X].

    Raises:
        ModuleError: if the two maps disagree on A[X]
    """
    if check:
        cell = F_C.compose(tensor_map_of_module_map(po.f, X)).first_difference(
            F_B.compose(tensor_map_of_module_map(po.inclusion, X))
        )
        if cell is not None:
            raise ModuleError(f"maps on the pushout pieces disagree on {cell!r}")
    DX = tensor_sset(po.D, X)
    images = {}
    for name in DX.cells:
        d, x, s, t = name
        side, cell = po.origin[d]
        images[name] = (F_C if side == "C" else F_B).images[(cell, x, s, t)]
    return ModuleMap(DX, F_C.target, images, check=False)


def slide(M: CellularModule, rule: Callable[[int, int], int]) -> ModuleMap:
    """M[Delta^1][Delta^1] -> M[Delta^1] induced by a monotone vertex rule (s, t) -> r."""
    X = delta(1)
    P = square()[0]
    forward, _ = flatten(M, X, X, P)
    mu = vertex_function_map(P, X, lambda v: (rule(v[0][0][0], v[1][0][0]),))
    return tensor_map(M, mu).compose(forward)


def _cylinder_slide(Tf: MappingCylinder) -> Homotopy:
    """id -> back . p on T(f) via (s, t) -> max(s, t) on the A[Delta^1] part."""
    A, B = Tf.f.source, Tf.f.target
    on_cylinder = Tf.po.leg_B.compose(slide(A, max))
    on_back = Tf.back.compose(projection(B, delta(1)))
    return Homotopy(tensor_induced(Tf.po, delta(1), on_back, on_cylinder))


def cylinder_retraction(f: ModuleMap, Tf: Optional[MappingCylinder] = None) -> DeformationData:
    """B is a deformation retract of T(f): homotopy back . p -> id relative to B."""
    Tf = Tf or mapping_cylinder(f)
    slide = _cylinder_slide(Tf)
    homotopy = reverse(slide, set(Tf.f.target.cells))
    return DeformationData(Tf.back, Tf.projection, homotopy).verify()


def straighten(H: Homotopy, s: ModuleMap, sub: Iterable[Hashable]) -> Homotopy:
    """Turn H: id -> s into a homotopy id -> s that is constant on ``sub``.

    s must be idempotent and the identity on ``sub``.  Over the square
    T[Delta^1 x Delta^1] the left edge is H, the top edge Hbar . s[Delta^1]
    and the bottom edge trivial; on ``sub`` the upper triangle is the filler
    that produced Hbar and the lower triangle is constant.  Filling the upper
    triangle at its middle vertex and the lower one at its first vertex
    leaves the right edge, which is the answer.
    """
    sub = set(sub)
    T = H.source
    ident = identity_map(T)
    Hbar, Z = reverse_with_filler(H)
    top = whisker(Hbar, pre=s)
    X = square()[0]
    v = square_vertex
    upper = X.simplex_from_vertices([v(0, 0), v(0, 1), v(1, 1)])[0]
    lower = X.simplex_from_vertices([v(0, 0), v(1, 0), v(1, 1)])[0]
    known: Images = {}
    _merge(known, _pull(H.carrier.images, [v(0, 0), v(0, 1)], X))
    _merge(known, _pull(top.carrier.images, [v(0, 1), v(1, 1)], X))
    _merge(known, _pull(trivial(ident).carrier.images, [v(0, 0), v(1, 0)], X))
    _merge(known, _pull({n: x for n, x in Z.images.items() if n[0] in sub}, [v(0, 0), v(0, 1), v(1, 1)], X))
    _merge(known, _pull(_constant_on(ident, sub, delta(2)), [v(0, 0), v(1, 0), v(1, 1)], X))
    F = extend_over(T, X, sub, known, [(upper, 1), (lower, 0)], T)
    right = along(F, vertex_function_map(delta(1), X, {(0,): v(1, 0), (1,): v(1, 1)}))
    return Homotopy(right).verify(ident, s, sub)


def deformation_coretraction(
    f: ModuleMap, w: EquivalenceWitness, Tf: Optional[MappingCylinder] = None
) -> DeformationData:
    """A is a deformation retract of T(f) when f is a homotopy equivalence.

    r is g on B and the reversed homotopy id -> g.f on A[Delta^1].  A
    homotopy s = front . r -> id is assembled from the cylinder slide and
    the witness, then straightened to be constant on A.

    Raises:
        WitnessError: if w does not verify f
    """
    w.verify()
    require_equal("witness is for f", w.forward, f)
    Tf = Tf or mapping_cylinder(f)
    g = w.inverse
    r = Tf.po.induced(g, reverse(w.left).carrier)
    s = Tf.front.compose(r)
    R = _cylinder_slide(Tf)
    K = concat_many([
        whisker(R, pre=s),
        whisker(R, post=Tf.back.compose(f).compose(r)),
        whisker(w.right, pre=Tf.projection, post=Tf.back),
        reverse(R),
    ])
    sub = image_cells(Tf.front)
    relative = straighten(reverse(K), s, sub)
    logger.debug("deformation coretraction built over %d cells", len(Tf.module))
    return DeformationData(Tf.front, r, reverse(relative, sub)).verify()


def strong_deformation(j: ModuleMap, w: EquivalenceWitness) -> DeformationData:
    """Deformation data for a cellular inclusion that is a homotopy equivalence.

    The witness homotopy g.j -> id is extended over C starting at g, which
    yields r with r.j = id; j.r -> id is then straightened relative to A.
    """
    w.verify()
    require_equal("witness is for j", w.forward, j)
    corr = require_cellular_inclusion(j)
    sub = set(corr.values())
    A, C = j.source, j.target
    g = w.inverse
    known: Images = {
        name: A.apply(g.images[name[0]], name[2])
        for name in tensor_sset(C, delta(1)).cells
        if name[1] == (0,)
    }
    for (a, x, s, t), value in w.left.carrier.images.items():
        name = (corr[a], x, s, t)
        if name in known and known[name] != value:
            raise OverlapError(name, "witness homotopy does not start at g")
        known[name] = value
    extension = Homotopy(_fill_cells(C, sub, 1, 0, known, A))
    r = extension.end
    s = j.compose(r)
    K = concat(reverse(whisker(extension, post=j)), w.right)
    relative = straighten(reverse(K), s, sub)
    return DeformationData(j, r, reverse(relative, sub)).verify()


def push_deformation(po: Pushout, data: DeformationData) -> DeformationData:
    """Deformation data for C -> D when D is the pushout along data.inclusion."""
    require_equal("pushout is along the deformation", po.inclusion, data.inclusion)
    C = po.f.target
    r = po.induced(identity_map(C), po.f.compose(data.retraction))
    K = tensor_induced(
        po, delta(1),
        po.leg_C.compose(projection(C, delta(1))),
        po.leg_B.compose(data.homotopy.carrier),
    )
    return DeformationData(po.leg_C, r, Homotopy(K)).verify()
