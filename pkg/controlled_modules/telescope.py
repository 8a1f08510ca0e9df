"""Simplicial intervals, long homotopies, mapping telescopes and idempotents.

An interval is a word of edge directions; a long homotopy over it is a map
A[I] -> B.  Infinite constructions are represented truncated at a stage N:
a telescope keeps stages 0..N-1 as whole cylinders and stage N as its front
only, and witnesses that have to reach past the last stage land in the
telescope truncated one stage further out.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import pairwise
from typing import Callable, Hashable, Iterable, Mapping, Optional, Sequence

from .config import get_config
from .constants import MIN_TRUNCATION, Direction
from .exceptions import (
    IntervalError,
    ModuleError,
    TelescopeError,
    TruncationError,
    WitnessError,
)
from .homotopy import (
    DeformationData,
    EquivalenceWitness,
    Homotopy,
    _evaluate,
    _fill_cells,
    _merge,
    _pull,
    along,
    concat,
    concat_many,
    corestrict,
    delta,
    edge,
    extend_over,
    isomorphism_witness,
    projection,
    require_equal,
    reverse,
    saturation_compose,
    square,
    square_vertex,
    trivial,
    vertex_inclusion,
    whisker,
)
from .logging_config import get_logger
from .modules import (
    Cell,
    CellularModule,
    Coproduct,
    Element,
    ModuleMap,
    Pushout,
    coproduct,
    flatten,
    identity_map,
    pushout,
    submodule,
    tensor_map,
    tensor_map_of_module_map,
    tensor_sset,
    zero_map,
)
from .simplicial import (
    FinSimplicialSet,
    SSetMap,
    identity,
    interval_sset,
    operator_map,
    product,
    product_vertex,
    standard_simplex,
    vertex_function_map,
)

logger = get_logger("telescope")

Images = dict[Hashable, Element]

FORWARD = Direction.FORWARD
BACKWARD = Direction.BACKWARD


# ---------------------------------------------------------------------------
# Intervals
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """A simplicial interval: labels base..base+n joined by directed edges.

    Edge k joins labels base+k and base+k+1; a forward edge points from the
    smaller label to the larger one.
    """

    word: tuple[Direction, ...] = ()
    base: int = 0

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "word", tuple(Direction(d) for d in self.word))
        except ValueError as err:
            raise IntervalError(f"unknown edge direction in {self.word!r}") from err

    def __len__(self) -> int:
        return len(self.word)

    def __str__(self) -> str:
        return ",".join(d.value for d in self.word) or "point"

    @property
    def end(self) -> int:
        return self.base + len(self.word)

    @property
    def labels(self) -> range:
        return range(self.base, self.end + 1)

    @property
    def is_ordered(self) -> bool:
        return all(d is FORWARD for d in self.word)

    @property
    def sset(self) -> FinSimplicialSet:
        return _interval_sset(self.word, self.base)

    def vertex(self, label: int) -> Hashable:
        if label not in self.labels:
            raise IntervalError(f"label {label} is outside [{self.base}, {self.end}]")
        return (label,)

    def edge(self, k: int) -> Hashable:
        """Name of the k-th edge, listed source first."""
        if not 0 <= k < len(self.word):
            raise IntervalError(f"edge {k} out of range for an interval of length {len(self.word)}")
        a = self.base + k
        return (a, a + 1) if self.word[k] is FORWARD else (a + 1, a)

    def shifted(self, base: int) -> "Interval":
        return Interval(self.word, base)


@lru_cache(maxsize=None)
def _interval_sset(word: tuple[Direction, ...], base: int) -> FinSimplicialSet:
    # the point and the single forward edge at 0 are the standard simplices
    if base == 0 and word in ((), (FORWARD,)):
        return standard_simplex(len(word))
    edges = [Interval(word, base).edge(k) for k in range(len(word))]
    return interval_sset(edges, range(base, base + len(word) + 1))


_TOKENS = {
    "fwd": FORWARD, "f": FORWARD, "->": FORWARD, "forward": FORWARD,
    "bwd": BACKWARD, "b": BACKWARD, "<-": BACKWARD, "backward": BACKWARD,
}


def interval(text: str, base: int = 0) -> Interval:
    """Parse a comma separated word such as ``"fwd,bwd,fwd"``.

    Raises:
        IntervalError: on an unknown token
    """
    word = []
    for token in (t.strip().lower() for t in text.split(",")):
        if not token or token == "point":
            continue
        if token not in _TOKENS:
            raise IntervalError(f"unknown edge direction {token!r}")
        word.append(_TOKENS[token])
    return Interval(tuple(word), base)


def ordered(n: int, base: int = 0) -> Interval:
    """The interval with n forward edges."""
    return Interval((FORWARD,) * n, base)


def concat_intervals(I: Interval, J: Interval) -> Interval:
    return Interval(I.word + J.word, I.base)


def reverse_interval(I: Interval) -> Interval:
    """Same labels read backwards: label l becomes 2*base + n - l."""
    return Interval(tuple(d.flip() for d in reversed(I.word)), I.base)


@lru_cache(maxsize=None)
def _product(X: FinSimplicialSet, Y: FinSimplicialSet) -> tuple[FinSimplicialSet, SSetMap, SSetMap]:
    if X is delta(1) and Y is delta(1):
        return square()
    return product(X, Y)


def _edge_map(I: Interval, k: int) -> SSetMap:
    s, t = I.edge(k)
    return vertex_function_map(delta(1), I.sset, {(0,): (s,), (1,): (t,)}, check=False)


def _relabel(images: Mapping[Hashable, Element], rename: Callable[[int], int]) -> Images:
    """Rename the interval coordinate of values given over A[I]."""
    return {(e, tuple(rename(l) for l in x), s, t): value for (e, x, s, t), value in images.items()}


# ---------------------------------------------------------------------------
# Long homotopies
# ---------------------------------------------------------------------------


class LongHomotopy:
    """A homotopy over a simplicial interval, given by its carrier A[I] -> B."""

    def __init__(self, interval: Interval, carrier: ModuleMap):
        if getattr(carrier.source, "sset", None) is not interval.sset:
            raise IntervalError(f"carrier is not defined over the interval {interval}")
        self.interval = interval
        self.carrier = carrier
        self.source: CellularModule = carrier.source.module
        self.target: CellularModule = carrier.target

    def __repr__(self) -> str:
        return f"LongHomotopy[{self.interval}]({self.source!r} -> {self.target!r})"

    def at(self, label: int) -> ModuleMap:
        """The map at one label of the interval."""
        return self.carrier.compose(vertex_inclusion(self.source, self.interval.sset, self.interval.vertex(label)))

    @property
    def start(self) -> ModuleMap:
        return self.at(self.interval.base)

    @property
    def end(self) -> ModuleMap:
        return self.at(self.interval.end)

    def piece(self, k: int) -> Homotopy:
        """Edge k as a short homotopy along the edge's own orientation."""
        return Homotopy(along(self.carrier, _edge_map(self.interval, k)))

    def pieces(self) -> list[Homotopy]:
        return [self.piece(k) for k in range(len(self.interval))]

    def relative_defect(self, cells: Iterable[Hashable]) -> Optional[Hashable]:
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
    ) -> "LongHomotopy":
        """Check the carrier, the endpoints and relativity.

        Raises:
            WellDefinednessError: if the carrier is not a map
            WitnessError: naming the failing endpoint or the first moving cell
        """
        self.carrier.check()
        if start is not None:
            require_equal("H(start) = start", self.start, start)
        if end is not None:
            require_equal("H(end) = end", self.end, end)
        cell = self.relative_defect(rel)
        if cell is not None:
            raise WitnessError("H constant on the subcomplex", cell)
        return self

    @classmethod
    def from_pieces(
        cls, interval: Interval, pieces: Sequence[Homotopy], start: Optional[ModuleMap] = None
    ) -> "LongHomotopy":
        """Glue short homotopies, one per edge and read along the edge.

        Raises:
            IntervalError: if the number of pieces is not the length
            OverlapError: if consecutive pieces do not meet
        """
        if len(pieces) != len(interval):
            raise IntervalError(f"{len(pieces)} pieces for an interval of length {len(interval)}")
        if not pieces:
            if start is None:
                raise IntervalError("a homotopy over a point needs its value")
            return trivial_long(start, interval)
        images: Images = {}
        X = interval.sset
        for k, H in enumerate(pieces):
            s, t = interval.edge(k)
            _merge(images, _pull(H.carrier.images, {0: (s,), 1: (t,)}, X))
        A = pieces[0].source
        return cls(interval, ModuleMap(tensor_sset(A, X), pieces[0].target, images, check=True))


def trivial_long(f: ModuleMap, I: Interval) -> LongHomotopy:
    """Tr(f) over I."""
    return LongHomotopy(I, f.compose(projection(f.source, I.sset)))


def concat_homotopies(H1: LongHomotopy, H2: LongHomotopy) -> LongHomotopy:
    """H1 followed by H2 over the concatenated interval.

    Strictly associative, and Tr over a point is a strict unit.

    Raises:
        WitnessError: if H1 does not end where H2 starts
    """
    require_equal("H1 ends where H2 starts", H1.end, H2.start)
    I = concat_intervals(H1.interval, H2.interval)
    offset = H1.interval.end - H2.interval.base
    images = dict(H1.carrier.images)
    _merge(images, _relabel(H2.carrier.images, lambda l: l + offset))
    return LongHomotopy(I, ModuleMap(tensor_sset(H1.source, I.sset), H1.target, images, check=False))


def concat_many_long(homotopies: Sequence[LongHomotopy]) -> LongHomotopy:
    result = homotopies[0]
    for H in homotopies[1:]:
        result = concat_homotopies(result, H)
    return result


def inverse_homotopy(H: LongHomotopy) -> LongHomotopy:
    """H read backwards over the reversed interval."""
    I = H.interval
    pivot = 2 * I.base + len(I)
    J = reverse_interval(I)
    images = _relabel(H.carrier.images, lambda l: pivot - l)
    return LongHomotopy(J, ModuleMap(tensor_sset(H.source, J.sset), H.target, images, check=False))


def compress_homotopy(H: LongHomotopy, rel: Iterable[Hashable] = ()) -> Homotopy:
    """A short homotopy with the same endpoints.

    Backward pieces are reversed by a horn fill, then everything is
    concatenated; cells in ``rel`` stay fixed when H fixes them.
    """
    if not len(H.interval):
        return trivial(H.start)
    rel = set(rel)
    pieces = [
        piece if d is FORWARD else reverse(piece, rel)
        for d, piece in zip(H.interval.word, H.pieces())
    ]
    return concat_many(pieces, rel)


class LongHomotopy2:
    """A map A[I x J] -> B: rows run along I, columns along J."""

    def __init__(self, rows: Interval, columns: Interval, carrier: ModuleMap):
        self.rows = rows
        self.columns = columns
        self.product = _product(rows.sset, columns.sset)[0]
        if getattr(carrier.source, "sset", None) is not self.product:
            raise IntervalError(f"carrier is not defined over {rows} x {columns}")
        self.carrier = carrier
        self.source: CellularModule = carrier.source.module
        self.target: CellularModule = carrier.target

    def row(self, m: int) -> LongHomotopy:
        """The restriction to I x {m}."""
        w = self.columns.vertex(m)
        g = vertex_function_map(self.rows.sset, self.product, lambda v: product_vertex(v, w), check=False)
        return LongHomotopy(self.rows, along(self.carrier, g))

    def column(self, l: int) -> LongHomotopy:
        """The restriction to {l} x J."""
        u = self.rows.vertex(l)
        g = vertex_function_map(self.columns.sset, self.product, lambda v: product_vertex(u, v), check=False)
        return LongHomotopy(self.columns, along(self.carrier, g))


def _coordinates(v: Hashable) -> tuple[int, int]:
    """Labels of a product vertex ((u, (0,)), (w, (0,)))."""
    return v[0][0][0], v[1][0][0]


def concat_inverse_nullhomotopy(H: LongHomotopy) -> LongHomotopy2:
    """A 2-homotopy from H followed by its inverse to Tr(H(start)).

    The square (I then reversed I) x J is folded onto I by
    (l, m) -> min(l, 2n - l, n - m), measured from the base; the columns
    at both ends stay constant.
    """
    I = H.interval
    n, b = len(I), I.base
    loop = concat_intervals(I, reverse_interval(I))
    J = reverse_interval(I).shifted(0)
    P = _product(loop.sset, J.sset)[0]

    def fold(v: Hashable) -> Hashable:
        l, m = _coordinates(v)
        l -= b
        return (min(l, 2 * n - l, n - m) + b,)

    psi = vertex_function_map(P, I.sset, fold)
    G = LongHomotopy2(loop, J, H.carrier.compose(tensor_map(H.source, psi)))
    require_equal("first row is H followed by its inverse", G.row(0).carrier, concat_homotopies(H, inverse_homotopy(H)).carrier)
    require_equal("last row is constant", G.row(J.end).carrier, trivial_long(H.start, loop).carrier)
    logger.debug("nullhomotopy over %s x %s", loop, J)
    return G


def inverse_concat_nullhomotopy(H: LongHomotopy) -> LongHomotopy2:
    """The same for the inverse of H followed by H."""
    return concat_inverse_nullhomotopy(inverse_homotopy(H))


# ---------------------------------------------------------------------------
# Compressing intervals
# ---------------------------------------------------------------------------


def sweep(A: CellularModule, I: Interval) -> Homotopy:
    """A homotopy on A[I] from the collapse onto the base label to the identity.

    Filled square by square over I x Delta^1, starting from the constant
    column at the base label; the homotopy is constant there.
    """
    AI = tensor_sset(A, I.sset)
    ident = identity_map(AI)
    if not len(I):
        return trivial(ident)
    X = _product(I.sset, delta(1))[0]
    home = vertex_inclusion(A, I.sset, I.vertex(I.base))
    collapse = home.compose(projection(A, I.sset))

    def v(l: int, t: int) -> Hashable:
        return product_vertex((l,), (t,))

    def simplex(*vertices: Hashable) -> Hashable:
        return X.simplex_from_vertices(vertices)[0]

    known: Images = {}
    for t, f in ((0, collapse), (1, ident)):
        _merge(known, _pull(f.images, {l: v(l, t) for l in I.labels}, X))
    _merge(known, _pull(trivial(home).carrier.images, [v(I.base, 0), v(I.base, 1)], X))
    steps = []
    for k, d in enumerate(I.word):
        a = I.base + k
        if d is FORWARD:
            steps.append((simplex(v(a, 0), v(a, 1), v(a + 1, 1)), 1))
            steps.append((simplex(v(a, 0), v(a + 1, 0), v(a + 1, 1)), 0))
        else:
            steps.append((simplex(v(a + 1, 0), v(a, 0), v(a, 1)), 1))
            steps.append((simplex(v(a + 1, 0), v(a + 1, 1), v(a, 1)), 2))
    F = extend_over(A, X, (), known, steps, AI)
    H = Homotopy(F.compose(flatten(A, I.sset, delta(1), X)[0]))
    rel = {name for name in AI.cells if name[1] == I.vertex(I.base)}
    return H.verify(collapse, ident, rel)


def compress_interval(A: CellularModule, I: Interval) -> EquivalenceWitness:
    """Collapse A[I] onto a single edge, with an inverse keeping the endpoints.

    The kept edge is the first forward one (the first edge if there is
    none).  The inverse sends the ends of the short interval to the ends of
    I; the witness homotopies are not relative to the endpoints.

    Raises:
        IntervalError: for an interval of length zero
    """
    if not len(I):
        raise IntervalError("cannot compress an interval of length zero")
    p = next((k for k, d in enumerate(I.word) if d is FORWARD), 0)
    short = Interval((I.word[p],))
    cut = I.base + p
    collapse = tensor_map(A, vertex_function_map(I.sset, short.sset, lambda v: (0,) if v[0] <= cut else (1,)))
    if len(I) == 1:
        inverse = tensor_map(A, vertex_function_map(short.sset, I.sset, lambda v: (v[0] + I.base,)))
        return isomorphism_witness(collapse, inverse)

    ident_A = identity_map(A)
    home, far = (vertex_inclusion(A, I.sset, I.vertex(l)) for l in (I.base, I.end))
    swept = sweep(A, I)
    w_long = EquivalenceWitness(home, projection(A, I.sset), trivial(ident_A), swept)
    swept_short = sweep(A, short)
    w_short = EquivalenceWitness(
        vertex_inclusion(A, short.sset, (0,)), projection(A, short.sset), trivial(ident_A), swept_short
    )
    w = saturation_compose(home, collapse, w_f=w_long, w_gf=w_short)

    path = whisker(swept, pre=far)
    if short.word[0] is FORWARD:
        s = path.carrier
    else:
        flip = vertex_function_map(short.sset, delta(1), lambda v: (1 - v[0],))
        s = reverse(path).carrier.compose(tensor_map(A, flip))
    require_equal("inverse keeps the far end", s.compose(vertex_inclusion(A, short.sset, (1,))), far)

    to_s = whisker(swept_short, post=s)
    left = concat(reverse(whisker(to_s, pre=collapse)), w.left)
    right = concat(reverse(whisker(to_s, post=collapse)), w.right)
    logger.debug("compressed %s onto edge %d", I, p)
    return EquivalenceWitness(collapse, s, left, right).verify()


# ---------------------------------------------------------------------------
# Convergent limits of homotopies
# ---------------------------------------------------------------------------


def convergent_limit(
    H: LongHomotopy, filtration: Sequence[Iterable[Hashable]], indices: Sequence[int]
) -> Homotopy:
    """A short homotopy G with G(0) = H(start) and G(1) = H(end) that agrees
    with H stage by stage.

    ``filtration`` lists increasing cellular submodules A_0 <= A_1 <= ...
    exhausting the source, and H must be constant on A_i from label
    indices[i] on.  The pieces of H are concatenated one at a time; on the
    cells that have already settled the fill is the degenerate one, so G on
    A_i ends at H(indices[i]) and G is constant on every stage settled at
    the base label.

    Raises:
        IntervalError: if the interval is not ordered or an index is out of range
        TelescopeError: if the filtration is malformed or H moves a settled stage
    """
    I = H.interval
    if not I.is_ordered:
        raise IntervalError(f"convergent limits need an ordered interval, got {I}")
    stages = [set(cells) for cells in filtration]
    if len(stages) != len(indices) or not stages:
        raise TelescopeError("one stabilization index per filtration stage is required")
    for i, (a, b) in enumerate(pairwise(stages)):
        if not a <= b:
            raise TelescopeError(f"filtration is not increasing at stage {i + 1}")
    if stages[-1] != set(H.source.cells):
        raise TelescopeError("filtration does not exhaust the module")
    for cells in stages:
        submodule(H.source, cells)
    pieces = H.pieces()
    for i, (cells, n) in enumerate(zip(stages, indices)):
        if n not in I.labels:
            raise IntervalError(f"stabilization index {n} outside [{I.base}, {I.end}]")
        for k in range(n - I.base, len(I)):
            moving = pieces[k].relative_defect(cells)
            if moving is not None:
                raise TelescopeError(f"stage {i} still moves after label {n} at {moving!r}")

    if not pieces:
        return trivial(H.start)
    G = pieces[0]
    for k in range(1, len(pieces)):
        settled: set = set()
        for cells, n in zip(stages, indices):
            if n <= I.base + k:
                settled |= cells
        known: Images = {}
        _merge(known, _pull(G.carrier.images, (0, 1)))
        _merge(known, _pull(pieces[k].carrier.images, (1, 2)))
        degenerate = along(G.carrier, operator_map((0, 1, 1), 1))
        _merge(known, {name: value for name, value in degenerate.images.items() if name[0] in settled})
        Z = _fill_cells(H.source, settled, 2, 1, known, H.target)
        G = Homotopy(edge(Z, 0, 2, 2))
    fixed: set = set()
    for cells, n in zip(stages, indices):
        if n == I.base:
            fixed |= cells
    return G.verify(H.start, H.end, fixed)


# ---------------------------------------------------------------------------
# Long mapping cylinders and telescopes
# ---------------------------------------------------------------------------


@dataclass
class LongMappingCylinder:
    """M^I(f): A[I] glued to B along f at the end label of I."""

    map: ModuleMap
    interval: Interval
    pushout: Pushout
    module: CellularModule
    front: ModuleMap
    back: ModuleMap
    projection: ModuleMap

    @property
    def body(self) -> ModuleMap:
        """A[I] -> M^I(f)."""
        return self.pushout.leg_B


def mapping_cylinder_long(f: ModuleMap, I: Interval) -> LongMappingCylinder:
    A = f.source
    po = pushout(vertex_inclusion(A, I.sset, I.vertex(I.end)), f)
    front = po.leg_B.compose(vertex_inclusion(A, I.sset, I.vertex(I.base)))
    proj = po.induced(identity_map(f.target), f.compose(projection(A, I.sset)))
    return LongMappingCylinder(f, I, po, po.D, front, po.leg_C, proj)


class Telescope:
    """The mapping telescope of a self map f: A -> A over the interval I,
    truncated at stage N.

    Stage k < N contributes the cells (k, c) for the cells c of A[I] away
    from the end label; the end of stage k is glued to the front of stage
    k + 1 along f.  Stage N is the front (N, c) only.  Cells of stage k are
    the same for every truncation past k.
    """

    def __init__(self, f: ModuleMap, I: Interval, N: int, _family: Optional[dict] = None):
        if list(f.source.cells) != list(f.target.cells):
            raise ModuleError("a telescope needs a self map")
        if not len(I):
            raise IntervalError("a telescope needs an interval of positive length")
        if N < 0:
            raise TruncationError(required=0, given=N)
        self.map = f
        self.interval = I
        self.N = N
        self.base: CellularModule = f.source
        self.cylinder = tensor_sset(self.base, I.sset)
        self._home = I.vertex(I.base)
        self._end = I.vertex(I.end)
        self._enter = vertex_inclusion(self.base, I.sset, self._home).compose(f)
        self._stages: dict[int, ModuleMap] = {}
        self._family = {} if _family is None else _family
        self._family[N] = self

        self.module = CellularModule(self.base.ring, {})
        cells: dict[Hashable, Cell] = {}
        for k in range(N + 1):
            for c, cell in self.cylinder.cells.items():
                if c[1] == self._end or (k == N and c[1] != self._home):
                    continue
                cells[(k, c)] = Cell(cell.dim, tuple(self._push(k, a) for a in cell.attach), cell.label)
        self.module.cells = dict(sorted(cells.items(), key=lambda item: item[1].dim))
        logger.debug("telescope over %s at N=%d: %d cells", I, N, len(self.module))

    def __repr__(self) -> str:
        return f"Telescope[{self.interval}, N={self.N}]({self.base!r})"

    def _push(self, k: int, x: Element) -> Element:
        """An element of A[I] placed at stage k; the end label goes to stage k + 1."""
        one = self.base.ring.one()
        pieces = []
        for (c, s), coef in x.terms.items():
            if c[1] == self._end:
                entered = self.cylinder.apply(self._enter.images[c[0]], s)
                pieces.append((coef, _tag(k + 1, entered)))
            else:
                pieces.append((coef, Element(len(s) - 1, {((k, c), s): one})))
        return self.module.linear(x.degree, pieces)

    def stage_map(self, k: int) -> ModuleMap:
        """A[I] -> Tel as stage k, for k < N."""
        if not 0 <= k < self.N:
            raise TruncationError(required=k + 1, given=self.N)
        hit = self._stages.get(k)
        if hit is None:
            images = {c: self._push(k, self.cylinder.top(c)) for c in self.cylinder.cells}
            hit = self._stages[k] = ModuleMap(self.cylinder, self.module, images, check=False)
        return hit

    def front(self, k: int) -> ModuleMap:
        """A -> Tel onto the front of stage k, for k <= N."""
        if not 0 <= k <= self.N:
            raise TruncationError(required=k, given=self.N)
        cyl = self.cylinder
        return ModuleMap(
            self.base, self.module,
            {e: self.module.top((k, cyl.cell_over(e, self._home))) for e in self.base.cells},
            check=False,
        )

    @property
    def front_inclusion(self) -> ModuleMap:
        return self.front(0)

    def extend(self, M: int) -> "Telescope":
        """The same telescope truncated at M."""
        hit = self._family.get(M)
        if hit is None:
            hit = Telescope(self.map, self.interval, M, self._family)
        return hit

    def inclusion(self, M: int) -> ModuleMap:
        """Tel_N -> Tel_M for M >= N."""
        if M < self.N:
            raise TruncationError(required=self.N, given=M)
        other = self.extend(M)
        return ModuleMap(self.module, other.module, {t: other.module.top(t) for t in self.module.cells}, check=False)

    def shift(self) -> ModuleMap:
        """sh: Tel_N -> Tel_{N+1}, moving every stage one step out."""
        other = self.extend(self.N + 1)
        return ModuleMap(
            self.module, other.module,
            {(k, c): other.module.top((k + 1, c)) for k, c in self.module.cells},
            check=False,
        )


def _tag(k: int, x: Element) -> Element:
    return Element(x.degree, {((k, c), s): coef for (c, s), coef in x.terms.items()})


def telescope(f: ModuleMap, I: Optional[Interval] = None, N: Optional[int] = None) -> Telescope:
    """Tel^I_N(f); I defaults to Delta^1 and N to the configured truncation."""
    I = ordered(1) if I is None else I
    return Telescope(f, I, resolve_truncation(N, len(I)))


def resolve_truncation(N: Optional[int], longest_interval: int = 1) -> int:
    """The truncation to use, from the argument or the configuration.

    Raises:
        TruncationError: if an explicit N is below the minimum
    """
    if N is not None and N < MIN_TRUNCATION:
        raise TruncationError(required=MIN_TRUNCATION, given=N)
    return get_config().resolve_truncation(longest_interval, N)


def telescope_identity_iso(tel: Telescope) -> tuple[ModuleMap, ModuleMap]:
    """Tel^I_N(id) = A[I repeated N times], stage k shifted by k * len(I).

    Raises:
        TelescopeError: if the telescope map is not the identity
    """
    A, I, N = tel.base, tel.interval, tel.N
    if tel.map != identity_map(A):
        raise TelescopeError("only the telescope of the identity is a plain interval")
    n, b = len(I), I.base
    line = Interval(I.word * N, b)
    AL = tensor_sset(A, line.sset)
    forward = {}
    for k, c in tel.module.cells:
        e, x, s, t = c
        forward[(k, c)] = AL.top((e, tuple(l + k * n for l in x), s, t))
    backward = {}
    for name in AL.cells:
        e, y, s, t = name
        k = min((min(y) - b) // n, N)
        backward[name] = tel.module.top((k, (e, tuple(l - k * n for l in y), s, t)))
    return (
        ModuleMap(tel.module, AL, forward, check=True),
        ModuleMap(AL, tel.module, backward, check=True),
    )


def telescope_id_retract(A: CellularModule, N: int) -> DeformationData:
    """Tel_N(id_A) deformation retracts onto its front.

    Built on A[0, N] from the homotopy (l, j) -> min(l, j), made short with
    the convergent limit for the filtration by labels, stage i settling at
    label i.
    """
    tel = Telescope(identity_map(A), ordered(1), N)
    to_line, from_line = telescope_identity_iso(tel)
    line = ordered(N)
    AL = tensor_sset(A, line.sset)
    steps = ordered(N)
    P = _product(line.sset, steps.sset)[0]
    lower = vertex_function_map(P, line.sset, lambda v: (min(_coordinates(v)),))
    H = LongHomotopy(steps, tensor_map(A, lower).compose(flatten(A, line.sset, steps.sset, P)[0]))
    filtration = [{name for name in AL.cells if max(name[1]) <= i} for i in range(N + 1)]
    G = convergent_limit(H, filtration, list(range(N + 1)))
    on_line = DeformationData(vertex_inclusion(A, line.sset, (0,)), projection(A, line.sset), G).verify()
    data = DeformationData(
        from_line.compose(on_line.inclusion),
        on_line.retraction.compose(to_line),
        whisker(G, pre=to_line, post=from_line),
    )
    require_equal("inclusion is the front", data.inclusion, tel.front_inclusion)
    return data.verify()


# ---------------------------------------------------------------------------
# Induced maps
# ---------------------------------------------------------------------------


@dataclass
class InducedMap:
    """The map induced by a square a'.f ~ g.a, given by H from g.a to a'.f."""

    map: ModuleMap
    source: "LongMappingCylinder | Telescope"
    target: "LongMappingCylinder | Telescope"
    along: ModuleMap
    homotopy: LongHomotopy
    J: Interval

    @property
    def offset(self) -> int:
        return self.J.end - self.homotopy.interval.base


def whisker_long(H: LongHomotopy, pre: Optional[ModuleMap] = None, post: Optional[ModuleMap] = None) -> LongHomotopy:
    """post . H . pre[I]."""
    carrier = H.carrier
    if pre is not None:
        carrier = carrier.compose(tensor_map_of_module_map(pre, H.interval.sset))
    if post is not None:
        carrier = post.compose(carrier)
    return LongHomotopy(H.interval, carrier)


def _square_ends(g_a: ModuleMap, a_f: ModuleMap, H: LongHomotopy) -> None:
    require_equal("H starts at g.a", H.start, g_a)
    require_equal("H ends at a.f", H.end, a_f)


def _split_by_part(first: Images, second: Images, offset: int) -> Images:
    images = dict(first)
    _merge(images, _relabel(second, lambda l: l + offset))
    return images


def induced_cylinder_map(
    f: ModuleMap, g: ModuleMap, a: ModuleMap, a2: ModuleMap, H: LongHomotopy, J: Interval
) -> InducedMap:
    """(H, a)_*: M^{J, I}(f) -> M^J(g) for f: A -> A', g: B -> B', a: A -> B,
    a2: A' -> B' and H from g.a to a2.f over I.

    The J part of the source goes through a[J], the I part through H into
    the back of the target.

    Raises:
        WitnessError: if H does not start at g.a or end at a2.f
    """
    _square_ends(g.compose(a), a2.compose(f), H)
    L = concat_intervals(J, H.interval)
    source = mapping_cylinder_long(f, L)
    target = mapping_cylinder_long(g, J)
    A = f.source
    along_J = target.body.compose(tensor_map_of_module_map(a, J.sset))
    through_H = target.back.compose(H.carrier)
    offset = J.end - H.interval.base
    body = ModuleMap(
        tensor_sset(A, L.sset), target.module,
        _split_by_part(along_J.images, through_H.images, offset), check=False,
    )
    m = source.pushout.induced(target.back.compose(a2), body)
    m.check()
    require_equal("induced map respects the fronts", m.compose(source.front), target.front.compose(a))
    require_equal("induced map respects the backs", m.compose(source.back), target.back.compose(a2))
    return InducedMap(m, source, target, a, H, J)


def collapse_cylinder_map(f: ModuleMap, J: Interval, I: Interval) -> ModuleMap:
    """M^{J, I}(f) -> M^J(f) collapsing the I part onto the end of J."""
    L = concat_intervals(J, I)
    source = mapping_cylinder_long(f, L)
    target = mapping_cylinder_long(f, J)
    squash = vertex_function_map(L.sset, J.sset, lambda v: (min(v[0], J.end),))
    body = target.body.compose(tensor_map(f.source, squash))
    return source.pushout.induced(target.back, body)


def induced_telescope_map(
    f: ModuleMap, g: ModuleMap, a: ModuleMap, H: LongHomotopy, J: Optional[Interval] = None, N: Optional[int] = None
) -> InducedMap:
    """(H, a)_*: Tel^{J, I}_N(f) -> Tel^J_N(g) for self maps f of A and g of B,
    a: A -> B and H from g.a to a.f over I.

    Stage k sends its J part through a[J] to stage k of the target and its
    I part through H to the front of stage k + 1.

    Raises:
        WitnessError: if H does not start at g.a or end at a.f
    """
    J = ordered(1) if J is None else J
    N = resolve_truncation(N, len(J) + len(H.interval))
    _square_ends(g.compose(a), a.compose(f), H)
    L = concat_intervals(J, H.interval)
    source = Telescope(f, L, N)
    target = Telescope(g, J, N)
    along_J = tensor_map_of_module_map(a, J.sset)
    offset = J.end - H.interval.base
    through_H = _relabel(H.carrier.images, lambda l: l + offset)
    images: Images = {}
    for k in range(N):
        stage, ahead = target.stage_map(k), target.front(k + 1)
        per_stage = {c: stage(x) for c, x in along_J.images.items()}
        _merge(per_stage, {c: ahead(x) for c, x in through_H.items()})
        images.update({(k, c): per_stage[c] for c in source.cylinder.cells if (k, c) in source.module.cells})
    last = target.front(N).compose(a)
    for k, c in source.module.cells:
        if k == N:
            images[(k, c)] = last.images[c[0]]
    m = ModuleMap(source.module, target.module, images, check=True)
    require_equal("induced map respects the fronts", m.compose(source.front(0)), target.front(0).compose(a))
    return InducedMap(m, source, target, a, H, J)


def telescope_self_map(tel: Telescope) -> ModuleMap:
    """f_* = (Tr, f)_*: Tel_N(f) -> Tel_N(f), f applied stagewise."""
    f = tel.map
    ff = f.compose(f)
    return induced_telescope_map(f, f, f, trivial_long(ff, Interval()), tel.interval, tel.N).map


def extract_homotopy(induced: InducedMap) -> LongHomotopy:
    """Read H back off an induced map.

    Raises:
        TelescopeError: if the I part does not land where H would
    """
    H = induced.homotopy
    A = induced.along.source
    I = H.interval
    L = concat_intervals(induced.J, I)
    lift = tensor_map(A, vertex_function_map(I.sset, L.sset, lambda v: (v[0] + induced.offset,)))
    if isinstance(induced.source, Telescope):
        if induced.source.N < 1:
            raise TruncationError(required=1, given=induced.source.N)
        into = induced.source.stage_map(0)
        landing = induced.target.front(1)
    else:
        into = induced.source.body
        landing = induced.target.back
    carrier = corestrict(induced.map.compose(into).compose(lift), landing)
    if carrier is None:
        raise TelescopeError("the I part of the induced map leaves the image of H")
    return LongHomotopy(I, carrier)


def stack_squares(
    Hb: LongHomotopy, b: ModuleMap, Ha: LongHomotopy, a: ModuleMap
) -> tuple[ModuleMap, LongHomotopy]:
    """The outer square of two stacked squares: b.a with (Hb.a[I]) followed by (b.Ha)."""
    return b.compose(a), concat_homotopies(whisker_long(Hb, pre=a), whisker_long(Ha, post=b))


def box_compose(outer: InducedMap, inner: InducedMap) -> ModuleMap:
    """outer after inner, where inner was built over J followed by outer's I.

    Raises:
        IntervalError: if the intervals do not line up
    """
    expected = concat_intervals(outer.J, outer.homotopy.interval)
    if inner.J != expected:
        raise IntervalError(f"inner square uses J = {inner.J}, expected {expected}")
    return outer.map.compose(inner.map)


# ---------------------------------------------------------------------------
# Homotopies between induced maps
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _swap(X: FinSimplicialSet, Y: FinSimplicialSet) -> SSetMap:
    P = _product(X, Y)[0]
    Q = _product(Y, X)[0]
    return SSetMap(P, Q, {z: ((z[1], z[0]), identity(m)) for z, m in P.dims.items()}, check=False)


def swap_tensor(M: CellularModule, X: FinSimplicialSet, Y: FinSimplicialSet) -> ModuleMap:
    """The isomorphism M[X][Y] -> M[Y][X]."""
    P = _product(X, Y)[0]
    Q = _product(Y, X)[0]
    return flatten(M, Y, X, Q)[1].compose(tensor_map(M, _swap(X, Y))).compose(flatten(M, X, Y, P)[0])


def homotopy_criterion(first: InducedMap, second: InducedMap, H: Homotopy, G: LongHomotopy2) -> Homotopy:
    """A homotopy from (H^a, a)_* to (H^b, b)_* between telescope maps.

    H runs from a to b, and G: A[I x Delta^1] -> B is a square with rows
    H^a and H^b and columns g.H and H.f[Delta^1].  The result is the map
    induced by the square (f[Delta^1], g, H, G) read on Tel(f)[Delta^1].

    Raises:
        IntervalError: if the two squares use different intervals
        WitnessError: naming the first side of G that does not match
    """
    tel, target = first.source, first.target
    if not isinstance(tel, Telescope) or not isinstance(second.source, Telescope):
        raise TelescopeError("the criterion compares maps of telescopes")
    I = first.homotopy.interval
    if second.homotopy.interval != I or second.J != first.J:
        raise IntervalError("both squares must use the same intervals")
    if G.rows != I or G.columns != ordered(1):
        raise IntervalError("G must be defined over I x Delta^1")
    f, g = tel.map, target.map
    A = f.source
    J = ordered(1)
    H.verify(first.along, second.along)
    require_equal("G on I x {0} = H^a", G.row(0).carrier, first.homotopy.carrier)
    require_equal("G on I x {1} = H^b", G.row(1).carrier, second.homotopy.carrier)
    require_equal("G on {0} x J = g.H", G.column(I.base).carrier, g.compose(H.carrier))
    require_equal(
        "G on {i} x J = H.f[J]", G.column(I.end).carrier,
        H.carrier.compose(tensor_map_of_module_map(f, J.sset)),
    )

    P_JI = _product(J.sset, I.sset)[0]
    side = G.carrier.compose(tensor_map(A, _swap(J.sset, I.sset))).compose(flatten(A, J.sset, I.sset, P_JI)[0])
    induced = induced_telescope_map(
        tensor_map_of_module_map(f, J.sset), g, H.carrier, LongHomotopy(I, side), first.J, tel.N
    )
    L = concat_intervals(first.J, I)
    swap = swap_tensor(A, L.sset, J.sset)
    source = tensor_sset(tel.module, J.sset)
    images = {}
    for name in source.cells:
        (k, c), y, s, t = name
        images[name] = _tag(k, swap.images[(c, y, s, t)])
    iso = ModuleMap(source, induced.source.module, images, check=False)
    return Homotopy(induced.map.compose(iso)).verify(first.map, second.map)


def shift_homotopy(tel: Telescope) -> Homotopy:
    """A homotopy on Tel_N(f) into Tel_{N+1}(f) from the inclusion to sh . f_*.

    A point at height s of stage k slides to height s of stage k + 1: the
    square (s, t) is mapped onto Delta^2 by s + t, and Delta^2 goes to the
    two-edge interval by filling the horn of its two edges, stage k on the
    first edge and stage k + 1 after f on the second.

    Raises:
        IntervalError: unless the telescope is over Delta^1
    """
    if tel.interval != ordered(1):
        raise IntervalError("the shift homotopy is built for telescopes over Delta^1")
    A, f, N = tel.base, tel.map, tel.N
    nxt = tel.extend(N + 1)
    two = ordered(2)
    AT = tensor_sset(A, two.sset)
    known: Images = {}
    _merge(known, _pull(tensor_map(A, _edge_map(two, 0)).images, (0, 1)))
    _merge(known, _pull(tensor_map(A, _edge_map(two, 1)).images, (1, 2)))
    Z = _fill_cells(A, set(), 2, 1, known, AT)
    P = square()[0]
    q = vertex_function_map(P, delta(2), lambda v: (sum(_coordinates(v)),))
    template = Z.compose(tensor_map(A, q)).compose(flatten(A, delta(1), delta(1), P)[0])

    spread: dict[int, Images] = {}
    for k in range(N + 1):
        stage = nxt.stage_map(k)
        images = {name: stage.images[name] for name in AT.cells if max(name[1]) <= 1}
        if k < N:
            after = nxt.stage_map(k + 1).compose(tensor_map_of_module_map(f, delta(1)))
            for name in AT.cells:
                e, x, s, t = name
                if max(x) == 2:
                    images[name] = after.images[(e, tuple(l - 1 for l in x), s, t)]
        spread[k] = images
    source = tensor_sset(tel.module, delta(1))
    values = {}
    for name in source.cells:
        (k, c), y, s, t = name
        values[name] = _evaluate(nxt.module, spread[k], template.images[(c, y, s, t)])
    H = Homotopy(ModuleMap(source, nxt.module, values, check=True))
    return H.verify(tel.inclusion(N + 1), tel.shift().compose(telescope_self_map(tel)))


# ---------------------------------------------------------------------------
# Idempotents
# ---------------------------------------------------------------------------


@dataclass
class CoherentIdempotent:
    """eta: K -> K with H from eta.eta to eta and a square G on K[Delta^1 x Delta^1].

    G has rows eta.H (t = 0) and H (t = 1), and columns H.eta[Delta^1]
    (u = 0) and H (u = 1).
    """

    map: ModuleMap
    homotopy: Homotopy
    coherence: ModuleMap

    def sides(self) -> dict[str, tuple[ModuleMap, ModuleMap]]:
        e, H, G = self.map, self.homotopy, self.coherence
        P = square()[0]

        def side(a: tuple[int, int], b: tuple[int, int]) -> ModuleMap:
            return along(G, vertex_function_map(delta(1), P, {(0,): square_vertex(*a), (1,): square_vertex(*b)}, check=False))

        return {
            "G on t=0 is eta.H": (side((0, 0), (1, 0)), e.compose(H.carrier)),
            "G on t=1 is H": (side((0, 1), (1, 1)), H.carrier),
            "G on u=0 is H.eta[J]": (side((0, 0), (0, 1)), H.carrier.compose(tensor_map_of_module_map(e, delta(1)))),
            "G on u=1 is H": (side((1, 0), (1, 1)), H.carrier),
        }

    def verify(self) -> "CoherentIdempotent":
        """Raises WitnessError naming the first failing edge."""
        e = self.map
        self.homotopy.verify(e.compose(e), e)
        self.coherence.check()
        for name, (got, want) in self.sides().items():
            require_equal(name, got, want)
        return self


def coherence_check(e: ModuleMap, H: Homotopy, G: ModuleMap) -> bool:
    try:
        CoherentIdempotent(e, H, G).verify()
    except WitnessError as err:
        logger.info("coherence rejected: %s", err)
        return False
    return True


def strict_coherence(e: ModuleMap) -> CoherentIdempotent:
    """Constant data for a strict idempotent."""
    _require_strict(e)
    G = e.compose(projection(e.source, square()[0]))
    return CoherentIdempotent(e, trivial(e), G).verify()


def coherent_from_domination(i: ModuleMap, p: ModuleMap, H: Homotopy) -> CoherentIdempotent:
    """eta = i.p on L from i: K -> L, p: L -> K and H from p.i to id_K.

    The square is G(x, u, t) = i H_t(H_u(p x)).
    """
    L = p.source
    J = delta(1)
    eta = i.compose(p)
    inner = tensor_map_of_module_map(tensor_map_of_module_map(p, J), J)
    G = (
        i.compose(H.carrier)
        .compose(tensor_map_of_module_map(H.carrier, J))
        .compose(inner)
        .compose(flatten(L, J, J, square()[0])[1])
    )
    return CoherentIdempotent(eta, whisker(H, pre=p, post=i), G).verify()


def _require_strict(e: ModuleMap) -> None:
    cell = e.compose(e).first_difference(e)
    if cell is not None:
        raise TelescopeError(f"eta.eta != eta on {cell!r} and no homotopy is given")


def _is_strict(e: ModuleMap) -> bool:
    return e.compose(e).first_difference(e) is None


def _powers(e: ModuleMap) -> Callable[[int], ModuleMap]:
    """m -> e^m, each power composed once."""
    cache = {0: identity_map(e.source)}

    def power(m: int) -> ModuleMap:
        if m not in cache:
            cache[m] = e.compose(power(m - 1))
        return cache[m]

    return power


def _checked_homotopy(tel: Telescope, homotopy: Homotopy) -> Homotopy:
    if tel.interval != ordered(1):
        raise IntervalError("homotopy idempotents are handled on telescopes over Delta^1")
    e = tel.map
    return homotopy.verify(e.compose(e), e)


def idempotent_retraction(tel: Telescope, homotopy: Optional[Homotopy] = None) -> ModuleMap:
    """c: Tel_N(e) -> K with c . iota = e.

    Without a homotopy e must be strict and c is e on every stage.  Given H
    from e.e to e, every stage runs along H reversed, from e at its front to
    e.e at its end, where the next stage starts at e of the same point.

    Raises:
        TelescopeError: if e is not strict and no homotopy is given
        WitnessError: if the homotopy does not run from e.e to e
    """
    e = tel.map
    K = tel.base
    if homotopy is None:
        _require_strict(e)
        images = {(k, c): K.apply(e.images[c[0]], c[2]) for k, c in tel.module.cells}
    else:
        back = reverse(_checked_homotopy(tel, homotopy)).carrier
        images = {(k, c): back.images[c] for k, c in tel.module.cells}
    return ModuleMap(tel.module, K, images, check=True)


_PROFILES = {
    "s": lambda u, t: u,
    "t": lambda u, t: t,
    "max": lambda u, t: max(u, t),
}


def _profiles(K: CellularModule) -> dict[str, ModuleMap]:
    """K[Delta^1][Delta^1] -> K[Delta^1] for each height profile."""
    P = square()[0]
    flat = flatten(K, delta(1), delta(1), P)[0]
    return {
        key: tensor_map(K, vertex_function_map(P, delta(1), lambda v, rule=rule: (rule(*_coordinates(v)),))).compose(flat)
        for key, rule in _PROFILES.items()
    }


Region = tuple[str, bool, int]


def _walk(
    tel: Telescope, L: Interval, target: CellularModule, region: Callable[[int, int], ModuleMap]
) -> LongHomotopy:
    """A long homotopy on Tel_N(f) over L, given stage by stage.

    region(k, p) is the map K[Delta^1][Delta^1] -> target used on stage k
    along edge p: the inner factor is the height in the stage, the outer
    one is edge p read in its own orientation.  Neighbouring stages and
    edges must agree where they meet.
    """
    source = tensor_sset(tel.module, L.sset)
    by_simplex: dict[Hashable, list] = {}
    for name in source.cells:
        by_simplex.setdefault(name[1], []).append(name)
    placed: dict[tuple[int, int], ModuleMap] = {}
    images: Images = {}
    for p in range(len(L)):
        s, t = L.edge(p)
        for y, y0 in (((s, t), (0, 1)), ((s,), (0,)), ((t,), (1,))):
            values = {}
            for name in by_simplex[y]:
                (k, c), _, sigma, tau = name
                if (k, p) not in placed:
                    placed[(k, p)] = region(k, p)
                values[name] = placed[(k, p)].images[(c, y0, sigma, tau)]
            _merge(images, values)
    return LongHomotopy(L, ModuleMap(source, target, images, check=True))


def _way_back(
    nxt: Telescope, plain: dict[str, ModuleMap], power: Callable[[int], ModuleMap], k: int, j: int
) -> ModuleMap:
    """Stage k during the return step at stage j.

    Above k the point retraces stage j at e^(j - k) of itself; at j = k it
    is swept down to its own height and below k it stays put.
    """
    if j > k:
        return nxt.stage_map(j).compose(tensor_map_of_module_map(power(j - k), delta(1))).compose(plain["t"])
    return nxt.stage_map(k).compose(plain["max" if j == k else "s"])


def _out_and_back(tel: Telescope, forward_region: Callable[[int, int], Region]) -> LongHomotopy:
    """A long homotopy Tel_N(e) -> Tel_{N+1}(e) out along the stages and back.

    The interval has N + 1 forward steps j = 0..N followed by N + 1
    backward steps j = N..0.  forward_region(k, j) names the profile used on
    stage k during forward step j, with or without e, and the stage it is
    placed on.
    """
    N = tel.N
    nxt = tel.extend(N + 1)
    plain = _profiles(tel.base)
    power = _powers(tel.map)
    e_J = tensor_map_of_module_map(tel.map, delta(1))
    L = Interval((FORWARD,) * (N + 1) + (BACKWARD,) * (N + 1))

    def region(k: int, p: int) -> ModuleMap:
        if p > N:
            return _way_back(nxt, plain, power, k, 2 * N + 1 - p)
        key, use_e, stage = forward_region(k, p)
        profile = e_J.compose(plain[key]) if use_e else plain[key]
        return nxt.stage_map(stage).compose(profile)

    return _walk(tel, L, nxt.module, region)


def _fold(s: int, v: int) -> tuple[int]:
    return (s if v == 0 else 2,)


def _settling_squares(bottom: Homotopy, step: ModuleMap, last: Homotopy, N: int) -> dict[int, ModuleMap]:
    """Squares K[Delta^1][Delta^1] -> K, one per stage k <= N.

    Stage N is ``last`` at every height.  Stage k < N is ``bottom`` along
    the height at v = 0, the height-0 side of stage k + 1 after ``step`` at
    the top height, and constant at v = 1: the lower triangle is a 2-horn
    filled at vertex 1, the upper one is degenerate.
    """
    K = bottom.source
    P = square()[0]
    flat = flatten(K, delta(1), delta(1), P)[0]
    fold = tensor_map(K, vertex_function_map(P, delta(2), lambda v: _fold(*_coordinates(v)))).compose(flat)
    squares = {N: last.carrier.compose(_profiles(K)["t"])}
    side = last
    for k in range(N - 1, -1, -1):
        known: Images = {}
        _merge(known, _pull(bottom.carrier.images, (0, 1)))
        _merge(known, _pull(whisker(side, pre=step).carrier.images, (1, 2)))
        Z = _fill_cells(K, set(), 2, 1, known, bottom.target)
        squares[k] = Z.compose(fold)
        side = Homotopy(edge(Z, 0, 2, 2))
    return squares


def _coherent_retraction_homotopy(tel: Telescope, H: Homotopy) -> LongHomotopy:
    """iota . c ~ inc for the retraction along H.

    Out: the image of c is carried along the stages, e^j of it on stage j.
    Settle: on the front of stage N + 1, e^(N+1) of H reversed is moved onto
    e^(N+1-k) on stage k by the settling squares, stage N going down from
    e^(N+2) to e along H.  Back: as for a strict idempotent.
    """
    e, N = tel.map, tel.N
    nxt = tel.extend(N + 1)
    plain = _profiles(tel.base)
    power = _powers(e)
    back = reverse(H)
    down = concat_many([whisker(H, post=power(m)) for m in range(N, -1, -1)])
    squares = _settling_squares(whisker(back, post=power(N + 1)), e, down, N)
    front = nxt.front(N + 1)
    L = Interval((FORWARD,) * (N + 2) + (BACKWARD,) * (N + 1))

    def region(k: int, p: int) -> ModuleMap:
        if p <= N:
            return nxt.stage_map(p).compose(tensor_map_of_module_map(power(p).compose(back.carrier), delta(1)))
        if p == N + 1:
            return front.compose(squares[k])
        return _way_back(nxt, plain, power, k, 2 * N + 2 - p)

    return _walk(tel, L, nxt.module, region)


def retraction_homotopy(tel: Telescope, homotopy: Optional[Homotopy] = None) -> Homotopy:
    """iota . c ~ inc as maps Tel_N(e) -> Tel_{N+1}(e).

    c is the retraction of :func:`idempotent_retraction`, along ``homotopy``
    when one is given.
    """
    c = idempotent_retraction(tel, homotopy)
    nxt = tel.extend(tel.N + 1)
    if homotopy is None:
        H = _out_and_back(tel, lambda k, j: ("t", True, j))
    else:
        H = _coherent_retraction_homotopy(tel, homotopy)
    start, end = nxt.front(0).compose(c), tel.inclusion(tel.N + 1)
    H.verify(start, end)
    return compress_homotopy(H).verify(start, end)


def _sweep_region(k: int, j: int) -> Region:
    if j < k:
        return ("s", True, k)
    if j == k:
        return ("max", True, k)
    return ("t", True, j)


def _coherent_identity_homotopy(tel: Telescope, H: Homotopy) -> LongHomotopy:
    """e_* ~ inc: the strict sweep with e^(j-k+1) above stage k, and H
    after e^(N-k) on the front of stage N + 1 to meet the way back."""
    e, N = tel.map, tel.N
    nxt = tel.extend(N + 1)
    plain = _profiles(tel.base)
    power = _powers(e)
    e_J = tensor_map_of_module_map(e, delta(1))
    front = nxt.front(N + 1)
    L = Interval((FORWARD,) * (N + 2) + (BACKWARD,) * (N + 1))

    def region(k: int, p: int) -> ModuleMap:
        if p <= N:
            if p <= k:
                return nxt.stage_map(k).compose(e_J).compose(plain["s" if p < k else "max"])
            return nxt.stage_map(p).compose(tensor_map_of_module_map(power(p - k + 1), delta(1))).compose(plain["t"])
        if p == N + 1:
            return front.compose(whisker(H, pre=power(N - k)).carrier).compose(plain["t"])
        return _way_back(nxt, plain, power, k, 2 * N + 2 - p)

    return _walk(tel, L, nxt.module, region)


def idempotent_identity_homotopy(tel: Telescope, homotopy: Optional[Homotopy] = None) -> Homotopy:
    """e_* ~ inc as maps Tel_N(e) -> Tel_{N+1}(e).

    Raises:
        TelescopeError: if e is not strict and no homotopy is given
    """
    if homotopy is None:
        _require_strict(tel.map)
        H = _out_and_back(tel, _sweep_region)
    else:
        H = _coherent_identity_homotopy(tel, _checked_homotopy(tel, homotopy))
    inc = tel.inclusion(tel.N + 1)
    start = inc.compose(telescope_self_map(tel))
    H.verify(start, inc)
    return compress_homotopy(H).verify(start, inc)


def _complement_homotopy(e: ModuleMap, H: Homotopy) -> Homotopy:
    """(1 - e)^2 ~ 1 - e, as 1 - 2e plus H."""
    K = e.source
    one_minus = identity_map(K).sub(e)
    shift = one_minus.sub(e).compose(projection(K, delta(1)))
    return Homotopy(shift.add(H.carrier)).verify(one_minus.compose(one_minus), one_minus)


def _cross_homotopy(
    tel: Telescope, other: Telescope, c: ModuleMap, homotopy: Optional[Homotopy], null: Optional[Homotopy]
) -> Homotopy:
    """iota' . c ~ 0 from Tel_N(f) into the telescope ``other`` of g, where g.f
    is null.

    The image of c runs through the first stage of ``other`` to g.c on the
    front of its stage 1.  That is 0 for a strict idempotent; otherwise the
    settling squares take it to 0, stage N along ``null``.
    """
    first = Homotopy(other.stage_map(0).compose(tensor_map_of_module_map(c, delta(1))))
    if homotopy is None:
        return first
    squares = _settling_squares(whisker(reverse(homotopy), post=other.map), tel.map, null, tel.N)
    settle = Homotopy(_walk(tel, ordered(1), other.base, lambda k, p: squares[k]).carrier)
    return concat(first, whisker(settle, post=other.front(1)))


@dataclass
class TruncatedEquivalence:
    """f: K -> W with g: W -> K, g.f ~ id_K, and f.g ~ inc where the right
    homotopy lands in W truncated one stage further out."""

    forward: ModuleMap
    inverse: ModuleMap
    left: Homotopy
    right: Homotopy
    extension: ModuleMap

    def verify(self) -> "TruncatedEquivalence":
        f, g, inc = self.forward, self.inverse, self.extension
        self.left.verify(g.compose(f), identity_map(f.source))
        self.right.verify(inc.compose(f).compose(g), inc)
        return self


@dataclass
class SplitResult:
    """The splitting K ~ Tel(e) v Tel(1 - e) of an idempotent e.

    ``homotopy`` is the homotopy from e.e to e the splitting was built
    along, None for a strict idempotent.
    """

    idempotent: ModuleMap
    truncation: int
    telescope: Telescope
    complement: Telescope
    wedge: Coproduct
    retraction: ModuleMap
    equivalence: TruncatedEquivalence
    square: Homotopy
    identity_homotopy: Homotopy = field(repr=False)
    homotopy: Optional[Homotopy] = field(default=None, repr=False)

    @property
    def strict(self) -> bool:
        return self.homotopy is None

    @property
    def summand_projection(self) -> ModuleMap:
        """pr: W -> W onto the Tel(e) summand."""
        W = self.wedge
        return W.copair(W.left, zero_map(self.complement.module, W.module))

    def verify(self) -> "SplitResult":
        e = self.idempotent
        f, g = self.equivalence.forward, self.equivalence.inverse
        self.equivalence.verify()
        self.square.verify(f.compose(e), self.summand_projection.compose(f))
        require_equal("f^-1 . pr . f = eta", g.compose(self.summand_projection).compose(f), e)
        return self


def split_idempotent(
    e: ModuleMap,
    N: Optional[int] = None,
    homotopy: Optional[Homotopy] = None,
    coherence: Optional[ModuleMap] = None,
) -> SplitResult:
    """Split an idempotent e of K as K ~ Tel(e) v Tel(1 - e).

    A strict idempotent needs no further data.  Otherwise e must come with
    its homotopy H from e.e to e and coherence square; the retractions run
    along H and along 1 - 2e + H, the homotopy from (1 - e)^2 to 1 - e.
    Coherence data, when given, is checked first.

    Raises:
        WitnessError: if the coherence data is given and fails
        TelescopeError: if e.e != e and the coherence data is missing
        TruncationError: if N is below the minimum
    """
    K = e.source
    strict = _is_strict(e)
    if homotopy is not None or coherence is not None:
        if homotopy is None or coherence is None:
            raise TelescopeError("coherence needs both the homotopy and the square")
        CoherentIdempotent(e, homotopy, coherence).verify()
    elif not strict:
        _require_strict(e)
    N = resolve_truncation(N)
    J = delta(1)
    ident = identity_map(K)
    complement = ident.sub(e)
    H_e = None if strict else homotopy
    H_c = None if strict else _complement_homotopy(e, homotopy)
    null = None if strict else Homotopy(e.compose(projection(K, J)).sub(homotopy.carrier))

    tel_e, tel_c = Telescope(e, ordered(1), N), Telescope(complement, ordered(1), N)
    nxt_e, nxt_c = tel_e.extend(N + 1), tel_c.extend(N + 1)
    W = coproduct(tel_e.module, tel_c.module)
    W1 = coproduct(nxt_e.module, nxt_c.module)
    c_e, c_c = idempotent_retraction(tel_e, H_e), idempotent_retraction(tel_c, H_c)

    f = W.left.compose(tel_e.front(0)).add(W.right.compose(tel_c.front(0)))
    g = W.copair(c_e, c_c)
    inc = W.copair(W1.left.compose(tel_e.inclusion(N + 1)), W1.right.compose(tel_c.inclusion(N + 1)))

    # the other summand's first cylinder joins iota . c to 0
    on_e = W1.left.compose(retraction_homotopy(tel_e, H_e).carrier).add(
        W1.right.compose(_cross_homotopy(tel_e, nxt_c, c_e, H_e, null).carrier)
    )
    on_c = W1.right.compose(retraction_homotopy(tel_c, H_c).carrier).add(
        W1.left.compose(_cross_homotopy(tel_c, nxt_e, c_c, H_c, null).carrier)
    )
    WJ = tensor_sset(W.module, J)
    images = {}
    for name in WJ.cells:
        (side, t), y, s, tau = name
        images[name] = (on_e if side == "L" else on_c).images[(t, y, s, tau)]
    right = Homotopy(ModuleMap(WJ, W1.module, images, check=True))
    equivalence = TruncatedEquivalence(f, g, trivial(ident), right, inc).verify()

    out_twice_and_back = Interval((FORWARD, FORWARD, BACKWARD))
    settle_e = trivial(tel_e.front(1).compose(e)) if strict else whisker(homotopy, post=tel_e.front(1))
    settle_c = trivial(zero_map(K, tel_c.module)) if strict else whisker(null, post=tel_c.front(1))
    to_e = LongHomotopy.from_pieces(out_twice_and_back, [
        Homotopy(tel_e.stage_map(0).compose(tensor_map_of_module_map(e, J))),
        settle_e,
        Homotopy(tel_e.stage_map(0)),
    ])
    to_c = LongHomotopy.from_pieces(out_twice_and_back, [
        Homotopy(tel_c.stage_map(0).compose(tensor_map_of_module_map(e, J))),
        settle_c,
        trivial(zero_map(K, tel_c.module)),
    ])
    both = LongHomotopy(out_twice_and_back, W.left.compose(to_e.carrier).add(W.right.compose(to_c.carrier)))
    result = SplitResult(
        idempotent=e,
        truncation=N,
        telescope=tel_e,
        complement=tel_c,
        wedge=W,
        retraction=c_e,
        equivalence=equivalence,
        square=compress_homotopy(both),
        identity_homotopy=idempotent_identity_homotopy(tel_e, H_e),
        homotopy=H_e,
    )
    logger.info("split %s idempotent on %d cells at N=%d", "strict" if strict else "coherent", len(K), N)
    return result.verify()
