"""Smith normal form over the integers, with transform tracking.

Matrices are lists of rows of Python ints.  The decomposition itself is
sympy's, computed on a ``DomainMatrix`` over ZZ.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import invariant_factors, smith_normal_decomp

from .logging_config import get_logger

logger = get_logger("snf")

Matrix = list[list[int]]


def identity_matrix(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    if not a:
        return []
    return _to_ints(_to_domain(a, len(a[0]) if a[0] else 0) * _to_domain(b, len(b[0]) if b else 0))


def _to_domain(matrix: Sequence[Sequence[int]], columns: int) -> DomainMatrix:
    rows = [[ZZ(int(a)) for a in row] for row in matrix]
    return DomainMatrix(rows, (len(rows), columns), ZZ)


def _to_ints(matrix: DomainMatrix) -> Matrix:
    return [[int(a) for a in row] for row in matrix.to_list()]


@dataclass
class SNFResult:
    """D = left * A * right with left and right unimodular."""

    diagonal: Matrix
    left: Matrix
    right: Matrix

    @property
    def invariants(self) -> list[int]:
        """Nonzero diagonal entries, each dividing the next."""
        n = min(len(self.diagonal), len(self.diagonal[0]) if self.diagonal else 0)
        return [self.diagonal[i][i] for i in range(n) if self.diagonal[i][i] != 0]

    @property
    def rank(self) -> int:
        return len(self.invariants)


def smith_normal_form(matrix: Sequence[Sequence[int]], columns: Optional[int] = None) -> SNFResult:
    """Compute D, L, R with D = L * matrix * R.

    Args:
        matrix: integer matrix, m rows of n entries
        columns: number of columns (needed when there are no rows)
    """
    m = len(matrix)
    n = len(matrix[0]) if matrix else (columns or 0)
    if m == 0 or n == 0:
        return SNFResult([[0] * n for _ in range(m)], identity_matrix(m), identity_matrix(n))
    diagonal, left, right = smith_normal_decomp(_to_domain(matrix, n))
    logger.debug("smith_normal_form: %dx%d matrix", m, n)
    return SNFResult(_to_ints(diagonal), _to_ints(left), _to_ints(right))


def kernel_basis(matrix: Sequence[Sequence[int]], columns: int) -> list[list[int]]:
    """A basis of the integer kernel {x : matrix * x = 0}.

    The last columns of the right transform span the kernel over Z, not
    only over Q.
    """
    if not matrix:
        return identity_matrix(columns)
    result = smith_normal_form(matrix, columns)
    r = result.rank
    return [[result.right[i][j] for i in range(columns)] for j in range(r, columns)]


def kernel_generators_mod(matrix: Sequence[Sequence[int]], columns: int, modulus: int) -> list[list[int]]:
    """Generators of {x in (Z/modulus)^columns : matrix * x = 0 mod modulus}."""
    rows = len(matrix)
    extended = [list(row) + [modulus if k == i else 0 for k in range(rows)] for i, row in enumerate(matrix)]
    gens = []
    seen = set()
    for vec in kernel_basis(extended, columns + rows):
        reduced = tuple(v % modulus for v in vec[:columns])
        if any(reduced) and reduced not in seen:
            seen.add(reduced)
            gens.append(list(reduced))
    return gens


def cokernel_invariants(relations: Sequence[Sequence[int]], generators: int) -> tuple[int, list[int]]:
    """Structure of Z^generators / rowspan(relations).

    Returns:
        (free rank, torsion coefficients > 1 in divisibility order)
    """
    if not relations or generators == 0:
        return generators, []
    invariants = [abs(int(d)) for d in invariant_factors(_to_domain(relations, generators)) if d != 0]
    torsion = [d for d in invariants if d > 1]
    return generators - len(invariants), torsion
