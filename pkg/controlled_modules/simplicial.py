"""Finite simplicial sets stored by their nondegenerate simplices.

A simplex of degree n is a pair ``(name, surj)`` where ``name`` is a
nondegenerate simplex of dimension k and ``surj`` is a monotone surjection
[n] -> [k] written as the tuple of its values.  Monotone maps [m] -> [n] are
tuples of length m + 1; the simplicial operator of a monotone map theta acts
on the right, ``x . theta``, so faces and degeneracies are the special cases
``theta = d^i`` and ``theta = s^i``.
"""

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from typing import Any, Callable, Hashable, Iterable, Iterator, Mapping, Optional, Union

from .exceptions import SimplicialError
from .logging_config import get_logger

logger = get_logger("simplicial")

Monotone = tuple[int, ...]
Simplex = tuple[Hashable, Monotone]


# ---------------------------------------------------------------------------
# Monotone maps
# ---------------------------------------------------------------------------


def identity(n: int) -> Monotone:
    """Identity of [n]."""
    return tuple(range(n + 1))


def coface(n: int, i: int) -> Monotone:
    """The injection d^i: [n-1] -> [n] skipping i."""
    if not 0 <= i <= n:
        raise SimplicialError(f"face index {i} out of range for degree {n}", face=i)
    return tuple(k if k < i else k + 1 for k in range(n))


def codegeneracy(n: int, i: int) -> Monotone:
    """The surjection s^i: [n+1] -> [n] hitting i twice."""
    if not 0 <= i <= n:
        raise SimplicialError(f"degeneracy index {i} out of range for degree {n}")
    return tuple(k if k <= i else k - 1 for k in range(n + 2))


def compose(phi: Monotone, theta: Monotone) -> Monotone:
    """phi after theta."""
    return tuple(phi[t] for t in theta)


def factor(phi: Monotone) -> tuple[Monotone, Monotone]:
    """Epi-mono factorization phi = delta . sigma.

    Returns:
        (delta, sigma): delta is the sorted image, sigma the surjection onto it
    """
    image = tuple(sorted(set(phi)))
    position = {v: k for k, v in enumerate(image)}
    return image, tuple(position[v] for v in phi)


def drop_index(phi: Monotone, j: int) -> Monotone:
    """Rewrite phi (missing j from its image) as a map into [n-1]."""
    return tuple(v - 1 if v > j else v for v in phi)


def repeats(surj: Monotone) -> frozenset[int]:
    """Positions i with surj(i) == surj(i + 1)."""
    return frozenset(i for i in range(len(surj) - 1) if surj[i] == surj[i + 1])


def surjection_from_repeats(n: int, rep: Iterable[int]) -> Monotone:
    """The surjection out of [n] whose repeat positions are ``rep``."""
    rep = set(rep)
    values = [0]
    for i in range(n):
        values.append(values[-1] + (0 if i in rep else 1))
    return tuple(values)


def surjections(n: int, k: int) -> Iterator[Monotone]:
    """All monotone surjections [n] -> [k], in a fixed order."""
    if k > n or k < 0:
        return
    for rep in combinations(range(n), n - k):
        yield surjection_from_repeats(n, rep)


def common_collapse(sigma: Monotone, tau: Monotone) -> tuple[Monotone, Monotone, Monotone]:
    """Split off the degeneracy shared by two surjections of equal source.

    Returns:
        (sigma', tau', rho) with sigma = sigma' . rho, tau = tau' . rho and
        (sigma', tau') jointly injective
    """
    n = len(sigma) - 1
    rho = surjection_from_repeats(n, repeats(sigma) & repeats(tau))
    size = rho[-1] + 1
    s2 = [0] * size
    t2 = [0] * size
    for i in range(n + 1):
        s2[rho[i]] = sigma[i]
        t2[rho[i]] = tau[i]
    return tuple(s2), tuple(t2), rho


def collapse_sequence(seq: tuple) -> tuple[tuple, Monotone]:
    """Remove consecutive repeats of a sequence, returning the degeneracy."""
    distinct: list = []
    surj: list[int] = []
    for item in seq:
        if not distinct or distinct[-1] != item:
            distinct.append(item)
        surj.append(len(distinct) - 1)
    return tuple(distinct), tuple(surj)


@dataclass(frozen=True)
class DegeneracyWord:
    """Degeneracy operator s_{i1} ... s_{ir} with i1 > ... > ir.

    ``target_dim`` is the dimension k of the simplex being degenerated; the
    word lands in degree k + len(indices).
    """

    indices: tuple[int, ...]
    target_dim: int

    def __post_init__(self) -> None:
        if any(a <= b for a, b in zip(self.indices, self.indices[1:])):
            raise SimplicialError(f"degeneracy word not strictly decreasing: {self.indices}")
        if self.indices and (self.indices[-1] < 0 or self.indices[0] >= self.source_dim):
            raise SimplicialError(f"degeneracy word out of range: {self.indices}")

    @property
    def source_dim(self) -> int:
        return self.target_dim + len(self.indices)

    def to_surjection(self) -> Monotone:
        return surjection_from_repeats(self.source_dim, self.indices)

    @classmethod
    def from_surjection(cls, surj: Monotone) -> "DegeneracyWord":
        return cls(tuple(sorted(repeats(surj), reverse=True)), surj[-1])


# ---------------------------------------------------------------------------
# Finite simplicial sets
# ---------------------------------------------------------------------------


class FinSimplicialSet:
    """A finite simplicial set given by nondegenerate simplices and face tables.

    Args:
        dims: nondegenerate simplex name -> dimension
        faces: name -> tuple of ``dim + 1`` simplices, the i-th being d_i
        validate: check references and the face identities on generators
    """

    def __init__(
        self,
        dims: Mapping[Hashable, int],
        faces: Mapping[Hashable, tuple[Simplex, ...]],
        validate: bool = True,
    ):
        self.dims: dict[Hashable, int] = dict(dims)
        self.faces: dict[Hashable, tuple[Simplex, ...]] = {
            x: tuple((y, tuple(s)) for y, s in faces.get(x, ())) for x in self.dims
        }
        self._cache: dict[tuple[Hashable, Monotone], Simplex] = {}
        self._vertex_index: Optional[dict[tuple, Hashable]] = None
        if validate:
            self._validate()

    def _validate(self) -> None:
        for x, k in self.dims.items():
            table = self.faces[x]
            if len(table) != (k + 1 if k > 0 else 0):
                raise SimplicialError(f"simplex {x!r} has {len(table)} faces, expected {k + 1}")
            for j, (y, surj) in enumerate(table):
                if y not in self.dims:
                    raise SimplicialError(f"face {j} of {x!r} references unknown {y!r}", face=j)
                if len(surj) != k or surj[-1] != self.dims[y] or factor(surj)[0] != identity(self.dims[y]):
                    raise SimplicialError(f"face {j} of {x!r} has a malformed degeneracy", face=j)
        for x, k in self.dims.items():
            for j in range(1, k + 1):
                for i in range(j):
                    left = self.face(self.faces[x][j], i)
                    right = self.face(self.faces[x][i], j - 1)
                    if left != right:
                        raise SimplicialError(f"d_{i} d_{j} != d_{j - 1} d_{i} on {x!r}", face=i)

    # -- structure ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.dims)

    def __contains__(self, name: Hashable) -> bool:
        return name in self.dims

    def __repr__(self) -> str:
        return f"FinSimplicialSet(f={self.f_vector()})"

    @property
    def dimension(self) -> int:
        return max(self.dims.values(), default=-1)

    def simplices(self, k: Optional[int] = None) -> list[Hashable]:
        """Nondegenerate simplices, optionally only those of dimension k."""
        if k is None:
            return list(self.dims)
        return [x for x, d in self.dims.items() if d == k]

    def f_vector(self) -> list[int]:
        return [len(self.simplices(k)) for k in range(self.dimension + 1)]

    def euler_characteristic(self) -> int:
        return sum((-1) ** d for d in self.dims.values())

    def top(self, name: Hashable) -> Simplex:
        """The nondegenerate simplex as a simplex of its own degree."""
        return (name, identity(self.dims[name]))

    def all_simplices(self, degree: int) -> Iterator[Simplex]:
        """Every simplex (degenerate or not) of the given degree."""
        for x, k in self.dims.items():
            for surj in surjections(degree, k):
                yield (x, surj)

    # -- simplicial operators ----------------------------------------------

    def apply(self, simplex: Simplex, theta: Monotone) -> Simplex:
        """Evaluate ``simplex . theta`` in normal form."""
        name, surj = simplex
        return self._resolve(name, compose(surj, theta))

    def _resolve(self, name: Hashable, phi: Monotone) -> Simplex:
        key = (name, phi)
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        image, surj = factor(phi)
        k = self.dims[name]
        if len(image) == k + 1:
            result = (name, surj)
        else:
            j = max(set(range(k + 1)) - set(image))
            y, tau = self.faces[name][j]
            result = self._resolve(y, compose(tau, drop_index(phi, j)))
        self._cache[key] = result
        return result

    def face(self, simplex: Simplex, i: int) -> Simplex:
        n = len(simplex[1]) - 1
        if n < 1:
            raise SimplicialError("vertices have no faces", face=i)
        return self.apply(simplex, coface(n, i))

    def degeneracy(self, simplex: Simplex, i: int) -> Simplex:
        return self.apply(simplex, codegeneracy(len(simplex[1]) - 1, i))

    def check_identities(self, max_degree: Optional[int] = None) -> None:
        """Check all face/degeneracy identities on every simplex up to max_degree.

        Raises:
            SimplicialError: naming the first failing identity
        """
        top = self.dimension + 1 if max_degree is None else max_degree
        for n in range(0, top + 1):
            for x in self.all_simplices(n):
                for j in range(n + 1):
                    if self.face(self.degeneracy(x, j), j) != x or self.face(self.degeneracy(x, j), j + 1) != x:
                        raise SimplicialError(f"d s_{j} != id on {x!r}", face=j)
                if n < 2:
                    continue
                for j in range(1, n + 1):
                    for i in range(j):
                        if self.face(self.face(x, j), i) != self.face(self.face(x, i), j - 1):
                            raise SimplicialError(f"d_{i} d_{j} identity fails on {x!r}", face=i)

    # -- vertices ----------------------------------------------------------

    def vertex(self, simplex: Simplex, i: int) -> Hashable:
        return self.apply(simplex, (i,))[0]

    def vertex_sequence(self, name: Hashable) -> tuple:
        return tuple(self.vertex(self.top(name), i) for i in range(self.dims[name] + 1))

    def _index(self) -> dict[tuple, Hashable]:
        if self._vertex_index is None:
            index: dict[tuple, Hashable] = {}
            for x in self.dims:
                index.setdefault(self.vertex_sequence(x), x)
            self._vertex_index = index
        return self._vertex_index

    def is_vertex_determined(self) -> bool:
        """True when distinct nondegenerate simplices have distinct vertex sequences."""
        return len(self._index()) == len(self.dims)

    def simplex_from_vertices(self, seq: Iterable[Hashable]) -> Simplex:
        """Find the simplex with the given vertex sequence.

        Raises:
            SimplicialError: if no simplex spans the sequence
        """
        distinct, surj = collapse_sequence(tuple(seq))
        name = self._index().get(distinct)
        if name is None:
            raise SimplicialError(f"no simplex with vertices {distinct!r}")
        return (name, surj)

    # -- subcomplexes ------------------------------------------------------

    def closure(self, names: Iterable[Hashable]) -> set[Hashable]:
        """Smallest subcomplex containing the given simplices."""
        result: set[Hashable] = set()
        stack = list(names)
        while stack:
            x = stack.pop()
            if x in result:
                continue
            result.add(x)
            stack.extend(y for y, _ in self.faces[x])
        return result

    def subcomplex(self, names: Iterable[Hashable]) -> "FinSimplicialSet":
        """The sub simplicial set on a face-closed set of names."""
        keep = set(names)
        for x in keep:
            for j, (y, _) in enumerate(self.faces[x]):
                if y not in keep:
                    raise SimplicialError(f"{x!r} has face {y!r} outside the subcomplex", face=j)
        return FinSimplicialSet(
            {x: k for x, k in self.dims.items() if x in keep},
            {x: t for x, t in self.faces.items() if x in keep},
            validate=False,
        )

    def to_dict(self, encode: Callable[[Any], Any] = lambda n: n) -> dict:
        """Plain-data form (names passed through ``encode``)."""
        by_dim: dict[str, list] = {}
        for x, k in self.dims.items():
            by_dim.setdefault(str(k), []).append(encode(x))
        return {
            "dims": self.f_vector(),
            "simplices": by_dim,
            "faces": [
                {
                    "name": encode(x),
                    "faces": [
                        {"target": encode(y), "word": list(DegeneracyWord.from_surjection(s).indices)}
                        for y, s in self.faces[x]
                    ],
                }
                for x in self.dims
            ],
        }


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------


class SSetMap:
    """Simplicial map given on nondegenerate source simplices."""

    def __init__(
        self,
        source: FinSimplicialSet,
        target: FinSimplicialSet,
        images: Mapping[Hashable, Simplex],
        check: bool = True,
    ):
        self.source = source
        self.target = target
        self.images = {x: (y, tuple(s)) for x, (y, s) in images.items()}
        if check:
            self.check()

    def __call__(self, simplex: Simplex) -> Simplex:
        name, surj = simplex
        return self.target.apply(self.images[name], surj)

    def check(self) -> None:
        """Verify dimensions and compatibility with faces.

        Raises:
            SimplicialError: at the first incompatible (simplex, face)
        """
        for x, k in self.source.dims.items():
            if x not in self.images:
                raise SimplicialError(f"map undefined on {x!r}")
            if len(self.images[x][1]) != k + 1:
                raise SimplicialError(f"image of {x!r} has the wrong degree")
            for j in range(k + 1 if k > 0 else 0):
                if self.target.face(self.images[x], j) != self(self.source.faces[x][j]):
                    raise SimplicialError(f"map does not commute with d_{j} on {x!r}", face=j)

    def compose(self, first: "SSetMap") -> "SSetMap":
        """self after first."""
        return SSetMap(first.source, self.target, {x: self(s) for x, s in first.images.items()}, check=False)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SSetMap) and self.images == other.images


def identity_map(X: FinSimplicialSet) -> SSetMap:
    return SSetMap(X, X, {x: X.top(x) for x in X.dims}, check=False)


def inclusion_map(sub: FinSimplicialSet, ambient: FinSimplicialSet) -> SSetMap:
    """Inclusion of a subcomplex whose names are ambient names."""
    return SSetMap(sub, ambient, {x: ambient.top(x) for x in sub.dims})


def vertex_function_map(
    X: FinSimplicialSet,
    Y: FinSimplicialSet,
    phi: Union[Mapping[Hashable, Hashable], Callable[[Hashable], Hashable]],
    check: bool = True,
) -> SSetMap:
    """Map into a vertex-determined set defined by a function on vertices."""
    fn = phi.__getitem__ if isinstance(phi, Mapping) else phi
    images = {x: Y.simplex_from_vertices(fn(v) for v in X.vertex_sequence(x)) for x in X.dims}
    return SSetMap(X, Y, images, check=check)


def characteristic_map(X: FinSimplicialSet, name: Hashable) -> SSetMap:
    """The map Delta^p -> X classifying a nondegenerate p-simplex."""
    p = X.dims[name]
    delta = standard_simplex(p)
    return SSetMap(delta, X, {s: X.apply(X.top(name), s) for s in delta.dims}, check=False)


# ---------------------------------------------------------------------------
# Constructions
# ---------------------------------------------------------------------------


def _simplex_tables(subsets: Iterable[tuple[int, ...]]) -> tuple[dict, dict]:
    dims: dict = {}
    faces: dict = {}
    for s in subsets:
        k = len(s) - 1
        dims[s] = k
        faces[s] = tuple((s[:j] + s[j + 1:], identity(k - 1)) for j in range(k + 1)) if k > 0 else ()
    return dims, faces


def _faces_of_simplex(n: int) -> list[tuple[int, ...]]:
    return [s for k in range(1, n + 2) for s in combinations(range(n + 1), k)]


@lru_cache(maxsize=None)
def standard_simplex(n: int) -> FinSimplicialSet:
    """Delta^n; simplices are named by their increasing vertex tuples."""
    if n < 0:
        raise SimplicialError(f"dimension must be >= 0, got {n}")
    return FinSimplicialSet(*_simplex_tables(_faces_of_simplex(n)), validate=False)


@lru_cache(maxsize=None)
def boundary(n: int) -> FinSimplicialSet:
    """The boundary of Delta^n as a subcomplex with Delta^n names."""
    if n < 1:
        raise SimplicialError(f"boundary needs n >= 1, got {n}")
    full = tuple(range(n + 1))
    return FinSimplicialSet(*_simplex_tables(s for s in _faces_of_simplex(n) if s != full), validate=False)


@lru_cache(maxsize=None)
def horn(n: int, i: int) -> FinSimplicialSet:
    """The horn: union of the faces d_j Delta^n with j != i."""
    if n < 1:
        raise SimplicialError(f"horn needs n >= 1, got {n}")
    if not 0 <= i <= n:
        raise SimplicialError(f"horn index {i} out of range for n={n}", face=i)
    full = tuple(range(n + 1))
    missing = full[:i] + full[i + 1:]
    return FinSimplicialSet(
        *_simplex_tables(s for s in _faces_of_simplex(n) if s not in (full, missing)), validate=False
    )


def product(X: FinSimplicialSet, Y: FinSimplicialSet) -> tuple[FinSimplicialSet, SSetMap, SSetMap]:
    """Categorical product with its two projections.

    Nondegenerate simplices are named ``((x, sigma), (y, tau))`` with x, y
    nondegenerate and sigma, tau jointly injective surjections.
    """
    dims: dict = {}
    for x, p in X.dims.items():
        for y, q in Y.dims.items():
            for m in range(max(p, q), p + q + 1):
                for rep_x in combinations(range(m), m - p):
                    rest = [i for i in range(m) if i not in rep_x]
                    for rep_y in combinations(rest, m - q):
                        sigma = surjection_from_repeats(m, rep_x)
                        tau = surjection_from_repeats(m, rep_y)
                        dims[((x, sigma), (y, tau))] = m
    # lower dimensions first keeps skeletal order
    ordered = dict(sorted(dims.items(), key=lambda item: item[1]))
    faces: dict = {}
    for name, m in ordered.items():
        if m == 0:
            faces[name] = ()
            continue
        (x, sigma), (y, tau) = name
        table = []
        for j in range(m + 1):
            x2, s2 = X.apply((x, sigma), coface(m, j))
            y2, t2 = Y.apply((y, tau), coface(m, j))
            s3, t3, rho = common_collapse(s2, t2)
            table.append((((x2, s3), (y2, t3)), rho))
        faces[name] = tuple(table)
    P = FinSimplicialSet(ordered, faces, validate=False)
    first = SSetMap(P, X, {n: n[0] for n in ordered}, check=False)
    second = SSetMap(P, Y, {n: n[1] for n in ordered}, check=False)
    logger.debug("product built: f=%s", P.f_vector())
    return P, first, second


def product_vertex(u: Hashable, w: Hashable) -> Hashable:
    """Name of the vertex (u, w) of a product."""
    return ((u, (0,)), (w, (0,)))


def product_map(
    P: FinSimplicialSet, Q: FinSimplicialSet, f: SSetMap, g: SSetMap
) -> SSetMap:
    """f x g between products P = X x Y and Q = X' x Y' built by ``product``."""
    images = {}
    for name in P.dims:
        a = f(name[0])
        b = g(name[1])
        s, t, rho = common_collapse(a[1], b[1])
        images[name] = (((a[0], s), (b[0], t)), rho)
    return SSetMap(P, Q, images, check=False)


def pair_map(Q: FinSimplicialSet, f: SSetMap, g: SSetMap) -> SSetMap:
    """The map (f, g): Z -> X x Y into a product Q built by ``product``."""
    images = {}
    for name in f.source.dims:
        a = f(f.source.top(name))
        b = g(g.source.top(name))
        s, t, rho = common_collapse(a[1], b[1])
        images[name] = (((a[0], s), (b[0], t)), rho)
    return SSetMap(f.source, Q, images, check=False)


def interval_sset(edges: Iterable[tuple[int, int]], labels: Iterable[int]) -> FinSimplicialSet:
    """One-dimensional set with vertices ``(l,)`` and edges ``(source, target)``."""
    dims: dict = {}
    faces: dict = {}
    for label in labels:
        dims[(label,)] = 0
        faces[(label,)] = ()
    for s, t in edges:
        if (s,) not in dims or (t,) not in dims:
            raise SimplicialError(f"edge ({s}, {t}) references a missing vertex")
        dims[(s, t)] = 1
        faces[(s, t)] = (((t,), (0,)), ((s,), (0,)))
    return FinSimplicialSet(dims, faces, validate=False)


def operator_map(theta: Monotone, n: int) -> SSetMap:
    """Delta^m -> Delta^n induced by a monotone theta: [m] -> [n]."""
    m = len(theta) - 1
    return vertex_function_map(standard_simplex(m), standard_simplex(n), lambda v: (theta[v[0]],), check=False)
