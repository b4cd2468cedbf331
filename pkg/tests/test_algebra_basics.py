from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from opkls.linalg import SparseMatrix, rank, rank_with_transpose_choice
from opkls.polynomial import Poly

from oracles import naive_rank

coeffs = st.lists(st.integers(-5, 5), max_size=5)


def test_poly_basics():
    p = Poly([2, -3, 1])
    assert str(p) == "t^2 - 3t + 2"
    assert p.degree == 2 and Poly().degree == -1
    assert p(1) == 0 and p(3) == 2
    assert p.reflect(2) == Poly([1, -3, 2])
    assert Poly([1, 2, 3, 4]).truncate_half(4) == Poly([1, 2])
    assert Poly([1, 2, 3, 4]).truncate_half(5) == Poly([1, 2, 3])
    assert p == Poly([2, -3, 1, 0])
    assert Poly([5]) == 5


@given(coeffs, coeffs, coeffs)
def test_poly_ring_laws(a, b, c):
    a, b, c = Poly(a), Poly(b), Poly(c)
    assert (a + b) * c == a * c + b * c
    assert (a * b) * c == a * (b * c)
    assert a - a == Poly()
    assert a * 1 == a and 3 * a == a + a + a


@given(coeffs, st.integers(4, 8))
def test_reflect_is_an_involution(a, n):
    p = Poly(a)
    assert p.reflect(n).reflect(n) == p


def test_sparse_matrix_ops():
    A = SparseMatrix.from_dense([[1, 2], [0, 1]])
    B = SparseMatrix.from_dense([[1, 0], [3, 1]])
    assert (A @ B).to_dense() == [[7, 2], [3, 1]]
    assert (A - A).is_zero()
    assert A.transpose().to_dense() == [[1, 0], [2, 1]]
    with pytest.raises(ValueError):
        A @ SparseMatrix(3, 1)


def test_rank_examples():
    assert rank(SparseMatrix.from_dense([[1, 2], [2, 4]])) == 1
    assert rank([{0: Fraction(1, 2), 1: Fraction(1, 3)}, {0: 3, 1: 2}]) == 1
    assert rank(SparseMatrix(0, 4)) == 0


@settings(max_examples=80, deadline=None)
@given(st.lists(st.lists(st.integers(-3, 3), min_size=5, max_size=5), min_size=1, max_size=7))
def test_rank_matches_naive_gauss_jordan(rows):
    m = SparseMatrix.from_dense(rows)
    assert rank(m) == naive_rank(rows)
    assert rank_with_transpose_choice(m) == naive_rank(rows)
