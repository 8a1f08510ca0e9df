"""Tests for Smith normal form, checked against sympy."""

import random

import pytest
import sympy
from sympy.matrices.normalforms import invariant_factors

from controlled_modules.snf import (
    cokernel_invariants,
    kernel_basis,
    kernel_generators_mod,
    matmul,
    smith_normal_form,
)


def random_matrix(rng, rows, cols, spread=6):
    return [[rng.randint(-spread, spread) for _ in range(cols)] for _ in range(rows)]


class TestSmithNormalForm:
    """Tests for the diagonalization and its transforms."""

    def test_known_example(self):
        result = smith_normal_form([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
        assert result.invariants == [2, 6, 12]

    def test_zero_matrix(self):
        assert smith_normal_form([[0, 0], [0, 0]]).invariants == []

    def test_no_rows(self):
        assert cokernel_invariants([], 3) == (3, [])

    @pytest.mark.parametrize("seed", range(20))
    def test_transforms_and_divisibility(self, seed):
        rng = random.Random(seed)
        rows, cols = rng.randint(1, 5), rng.randint(1, 5)
        A = random_matrix(rng, rows, cols)
        result = smith_normal_form(A)
        assert matmul(matmul(result.left, A), result.right) == result.diagonal
        assert sympy.Matrix(result.left).det() in (1, -1)
        assert sympy.Matrix(result.right).det() in (1, -1)
        for i in range(rows):
            for j in range(cols):
                if i != j:
                    assert result.diagonal[i][j] == 0
        invariants = result.invariants
        assert all(d > 0 for d in invariants)
        assert all(b % a == 0 for a, b in zip(invariants, invariants[1:]))

    @pytest.mark.parametrize("seed", range(20))
    def test_rank_matches_sympy(self, seed):
        rng = random.Random(100 + seed)
        A = random_matrix(rng, rng.randint(1, 5), rng.randint(1, 5), spread=3)
        assert smith_normal_form(A).rank == sympy.Matrix(A).rank()

    @pytest.mark.parametrize("seed", range(20))
    def test_determinant_matches_sympy(self, seed):
        rng = random.Random(200 + seed)
        n = rng.randint(1, 4)
        A = random_matrix(rng, n, n)
        det = abs(int(sympy.Matrix(A).det()))
        result = smith_normal_form(A)
        product = 1
        for d in result.invariants:
            product *= d
        assert (product if result.rank == n else 0) == det


class TestKernelAndCokernel:
    """Tests for kernels and cokernels over the integers."""

    def test_cokernel(self):
        assert cokernel_invariants([[2, 0], [0, 3]], 2) == (0, [6])
        assert cokernel_invariants([[1, -1]], 2) == (1, [])
        assert cokernel_invariants([[2, 0]], 2) == (1, [2])

    @pytest.mark.parametrize("seed", range(10))
    def test_kernel_basis(self, seed):
        rng = random.Random(300 + seed)
        rows, cols = rng.randint(1, 3), rng.randint(2, 5)
        A = random_matrix(rng, rows, cols, spread=3)
        basis = kernel_basis(A, cols)
        assert len(basis) == cols - sympy.Matrix(A).rank()
        for v in basis:
            assert all(sum(a * x for a, x in zip(row, v)) == 0 for row in A)

    def test_kernel_mod(self):
        gens = kernel_generators_mod([[1, 1]], 2, 2)
        assert gens
        for v in gens:
            assert (v[0] + v[1]) % 2 == 0

    def test_kernel_is_integral(self):
        """The basis spans the integer solutions, not only the rational ones."""
        basis = kernel_basis([[2, 4, 6]], 3)
        assert len(basis) == 2
        factors = invariant_factors(sympy.Matrix(basis), domain=sympy.ZZ)
        assert [abs(int(d)) for d in factors] == [1, 1]

    def test_zero_first_column(self):
        result = smith_normal_form([[0, 2], [0, 3]])
        assert result.invariants == [1]
        assert matmul(matmul(result.left, [[0, 2], [0, 3]]), result.right) == result.diagonal
        assert kernel_basis([[0, 2], [0, 3]], 2) in ([[1, 0]], [[-1, 0]])
