"""Coefficient rings: the integers, integers mod n and finite group rings.

Ring elements are plain Python values (``int`` for Z and Z/n, tuples of
base elements for group rings) so that they hash and compare exactly.
"""

import random
from typing import Any, Callable, Optional, Sequence

from .constants import RING_SAMPLE_COUNT
from .exceptions import RingError
from .logging_config import get_logger

logger = get_logger("rings")


class Ring:
    """Interface shared by the coefficient rings."""

    #: coordinates of elements are integers modulo this (None: unbounded)
    coordinate_modulus: Optional[int] = None

    def zero(self) -> Any:
        raise NotImplementedError

    def one(self) -> Any:
        raise NotImplementedError

    def add(self, a: Any, b: Any) -> Any:
        raise NotImplementedError

    def neg(self, a: Any) -> Any:
        raise NotImplementedError

    def mul(self, a: Any, b: Any) -> Any:
        raise NotImplementedError

    def from_int(self, n: int) -> Any:
        raise NotImplementedError

    def normalize(self, a: Any) -> Any:
        raise NotImplementedError

    def coordinates(self, a: Any) -> list[int]:
        raise NotImplementedError

    def from_coordinates(self, coords: Sequence[int]) -> Any:
        raise NotImplementedError

    def random(self, rng: random.Random, spread: int = 3) -> Any:
        raise NotImplementedError

    def to_json(self) -> dict:
        raise NotImplementedError

    @property
    def rank(self) -> int:
        """Number of integer coordinates per element."""
        return 1

    def sub(self, a: Any, b: Any) -> Any:
        return self.add(a, self.neg(b))

    def is_zero(self, a: Any) -> bool:
        return a == self.zero()

    def check_axioms(self, samples: int = RING_SAMPLE_COUNT, seed: int = 0) -> None:
        """Check the ring axioms on sampled triples.

        Raises:
            RingError: naming the failing axiom
        """
        rng = random.Random(seed)
        for _ in range(samples):
            a, b, c = (self.random(rng) for _ in range(3))
            if self.mul(self.mul(a, b), c) != self.mul(a, self.mul(b, c)):
                raise RingError(f"{self}: multiplication not associative")
            if self.mul(a, self.add(b, c)) != self.add(self.mul(a, b), self.mul(a, c)):
                raise RingError(f"{self}: left distributivity fails")
            if self.mul(self.add(a, b), c) != self.add(self.mul(a, c), self.mul(b, c)):
                raise RingError(f"{self}: right distributivity fails")
            if self.mul(self.one(), a) != a or self.mul(a, self.one()) != a:
                raise RingError(f"{self}: unit fails")
            if not self.is_zero(self.add(a, self.neg(a))):
                raise RingError(f"{self}: additive inverse fails")


class IntegerRing(Ring):
    """The ring Z."""

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1

    def add(self, a: int, b: int) -> int:
        return a + b

    def neg(self, a: int) -> int:
        return -a

    def mul(self, a: int, b: int) -> int:
        return a * b

    def from_int(self, n: int) -> int:
        return n

    def normalize(self, a: Any) -> int:
        return int(a)

    def coordinates(self, a: int) -> list[int]:
        return [a]

    def from_coordinates(self, coords: Sequence[int]) -> int:
        return int(coords[0])

    def random(self, rng: random.Random, spread: int = 3) -> int:
        return rng.randint(-spread, spread)

    def to_json(self) -> dict:
        return {"kind": "Z"}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, IntegerRing)

    def __hash__(self) -> int:
        return hash("Z")

    def __repr__(self) -> str:
        return "Z"


class ModularRing(Ring):
    """The ring Z/n."""

    def __init__(self, modulus: int):
        if modulus < 2:
            raise RingError(f"modulus must be >= 2, got {modulus}")
        self.modulus = modulus
        self.coordinate_modulus = modulus

    def zero(self) -> int:
        return 0

    def one(self) -> int:
        return 1

    def add(self, a: int, b: int) -> int:
        return (a + b) % self.modulus

    def neg(self, a: int) -> int:
        return (-a) % self.modulus

    def mul(self, a: int, b: int) -> int:
        return (a * b) % self.modulus

    def from_int(self, n: int) -> int:
        return n % self.modulus

    def normalize(self, a: Any) -> int:
        return int(a) % self.modulus

    def coordinates(self, a: int) -> list[int]:
        return [a]

    def from_coordinates(self, coords: Sequence[int]) -> int:
        return int(coords[0]) % self.modulus

    def random(self, rng: random.Random, spread: int = 3) -> int:
        return rng.randrange(self.modulus)

    def to_json(self) -> dict:
        return {"kind": "Zmod", "n": self.modulus}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ModularRing) and other.modulus == self.modulus

    def __hash__(self) -> int:
        return hash(("Zmod", self.modulus))

    def __repr__(self) -> str:
        return f"Z/{self.modulus}"


class GroupRing(Ring):
    """Group ring base[G] of a finite group given by its multiplication table.

    ``table[g][h]`` is the index of the product g*h.  Elements are tuples of
    base-ring coefficients indexed by group elements.
    """

    def __init__(self, base: Ring, table: Sequence[Sequence[int]]):
        if isinstance(base, GroupRing):
            raise RingError("group rings over group rings are not supported")
        self.base = base
        self.table = tuple(tuple(row) for row in table)
        self.order = len(self.table)
        if any(len(row) != self.order for row in self.table):
            raise RingError("multiplication table is not square")
        units = [g for g in range(self.order) if all(self.table[g][h] == h for h in range(self.order))]
        if not units:
            raise RingError("multiplication table has no identity")
        self.unit = units[0]
        self.coordinate_modulus = base.coordinate_modulus

    @property
    def rank(self) -> int:
        return self.order

    def zero(self) -> tuple:
        return tuple(self.base.zero() for _ in range(self.order))

    def one(self) -> tuple:
        return self.basis(self.unit)

    def basis(self, g: int) -> tuple:
        return tuple(self.base.one() if h == g else self.base.zero() for h in range(self.order))

    def add(self, a: tuple, b: tuple) -> tuple:
        return tuple(self.base.add(x, y) for x, y in zip(a, b))

    def neg(self, a: tuple) -> tuple:
        return tuple(self.base.neg(x) for x in a)

    def mul(self, a: tuple, b: tuple) -> tuple:
        out = list(self.zero())
        for g, x in enumerate(a):
            if self.base.is_zero(x):
                continue
            for h, y in enumerate(b):
                if self.base.is_zero(y):
                    continue
                k = self.table[g][h]
                out[k] = self.base.add(out[k], self.base.mul(x, y))
        return tuple(out)

    def from_int(self, n: int) -> tuple:
        return tuple(self.base.from_int(n) if h == self.unit else self.base.zero() for h in range(self.order))

    def normalize(self, a: Any) -> tuple:
        if isinstance(a, int):
            return self.from_int(a)
        if len(a) != self.order:
            raise RingError(f"group ring element needs {self.order} coefficients")
        return tuple(self.base.normalize(x) for x in a)

    def coordinates(self, a: tuple) -> list[int]:
        return [c for x in a for c in self.base.coordinates(x)]

    def from_coordinates(self, coords: Sequence[int]) -> tuple:
        return tuple(self.base.from_coordinates([c]) for c in coords)

    def random(self, rng: random.Random, spread: int = 2) -> tuple:
        return tuple(self.base.random(rng, spread) for _ in range(self.order))

    def to_json(self) -> dict:
        return {"kind": "group", "base": self.base.to_json(), "table": [list(r) for r in self.table]}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, GroupRing) and other.base == self.base and other.table == self.table

    def __hash__(self) -> int:
        return hash(("group", self.base, self.table))

    def __repr__(self) -> str:
        return f"{self.base!r}[G{self.order}]"


def cyclic_group_ring(base: Ring, order: int) -> GroupRing:
    """base[C_order] with the cyclic multiplication table."""
    return GroupRing(base, [[(g + h) % order for h in range(order)] for g in range(order)])


def ring_from_json(data: dict) -> Ring:
    """Inverse of ``Ring.to_json``."""
    kind = data.get("kind")
    if kind == "Z":
        return IntegerRing()
    if kind == "Zmod":
        return ModularRing(int(data["n"]))
    if kind == "group":
        return GroupRing(ring_from_json(data["base"]), data["table"])
    raise RingError(f"unknown ring kind: {kind!r}")


class RingMap:
    """A ring homomorphism given by a function on elements."""

    def __init__(self, source: Ring, target: Ring, fn: Callable[[Any], Any], name: str = ""):
        self.source = source
        self.target = target
        self.fn = fn
        self.name = name or f"{source!r}->{target!r}"

    def __call__(self, a: Any) -> Any:
        return self.fn(a)

    def compose(self, first: "RingMap") -> "RingMap":
        """self after first."""
        return RingMap(first.source, self.target, lambda a: self.fn(first.fn(a)), f"{self.name}.{first.name}")

    def check_homomorphism(self, samples: int = RING_SAMPLE_COUNT, seed: int = 0) -> None:
        """Check additivity, multiplicativity and unit on sampled elements.

        Raises:
            RingError: if a sample breaks a homomorphism law
        """
        rng = random.Random(seed)
        if self(self.source.one()) != self.target.one():
            raise RingError(f"{self.name} does not preserve the unit")
        for _ in range(samples):
            a, b = self.source.random(rng), self.source.random(rng)
            if self(self.source.mul(a, b)) != self.target.mul(self(a), self(b)):
                raise RingError(f"{self.name} is not multiplicative on sampled products")
            if self(self.source.add(a, b)) != self.target.add(self(a), self(b)):
                raise RingError(f"{self.name} is not additive on sampled sums")


def identity_ring_map(ring: Ring) -> RingMap:
    return RingMap(ring, ring, lambda a: a, "id")


def canonical_map(source: Ring, target: Ring) -> RingMap:
    """The canonical map Z -> S, Z/n -> Z/m (m | n), or R[G] -> S[G] coefficientwise.

    Raises:
        RingError: if no canonical homomorphism exists
    """
    if source == target:
        return identity_ring_map(source)
    if isinstance(source, IntegerRing):
        return RingMap(source, target, target.from_int, f"Z->{target!r}")
    if isinstance(source, ModularRing) and isinstance(target, ModularRing):
        if source.modulus % target.modulus != 0:
            raise RingError(f"no ring map {source!r} -> {target!r}")
        return RingMap(source, target, target.from_int, f"{source!r}->{target!r}")
    if isinstance(source, GroupRing) and isinstance(target, GroupRing) and source.table == target.table:
        inner = canonical_map(source.base, target.base)
        return RingMap(source, target, lambda a: tuple(inner(x) for x in a), f"{inner.name}[G]")
    raise RingError(f"no canonical ring map {source!r} -> {target!r}")


def augmentation(ring: GroupRing) -> RingMap:
    """R[G] -> R summing coefficients."""
    base = ring.base

    def fn(a: tuple) -> Any:
        total = base.zero()
        for x in a:
            total = base.add(total, x)
        return total

    return RingMap(ring, base, fn, "augmentation")
