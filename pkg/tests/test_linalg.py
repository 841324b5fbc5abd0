from __future__ import annotations

from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from jetcas.algebra import ONE_R, ZERO_R, parse_expr
from jetcas.linalg import (SingularMatrixError, det, inverse, matmul, nullspace, rank, rank_sparse, rref,
                           solve, to_sparse)

from conftest import to_sympy

small = st.fractions(min_value=-4, max_value=4, max_denominator=3)
matrices = st.integers(1, 4).flatmap(
    lambda r: st.integers(1, 4).flatmap(lambda c: st.lists(st.lists(small, min_size=c, max_size=c),
                                                           min_size=r, max_size=r)))


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_rank_against_sympy(a):
    assert rank(a) == sympy.Matrix(a).rank()
    assert rank_sparse(to_sparse(a)) == rank(a)


@settings(max_examples=60, deadline=None)
@given(matrices)
def test_nullspace_is_kernel(a):
    ns = nullspace(a, len(a[0]))
    assert len(ns) == len(a[0]) - rank(a)
    for v in ns:
        assert all(sum(x * y for x, y in zip(row, v)) == 0 for row in a)


def test_rref_pivots():
    rows, piv = rref([[Fraction(2), Fraction(4)], [Fraction(1), Fraction(2)]])
    assert piv == [0]
    assert rows[0] == [1, 2]


def test_solve_and_inverse():
    a = [[Fraction(2), Fraction(1)], [Fraction(1), Fraction(3)]]
    x = solve(a, [Fraction(3), Fraction(5)])
    assert x == [Fraction(4, 5), Fraction(7, 5)]
    ai = inverse(a)
    assert matmul(a, ai) == [[1, 0], [0, 1]]
    assert det(a) == 5


def test_singular_systems():
    with pytest.raises(SingularMatrixError):
        solve([[Fraction(1), Fraction(1)], [Fraction(2), Fraction(2)]], [Fraction(1), Fraction(3)])
    with pytest.raises(SingularMatrixError):
        inverse([[Fraction(1), Fraction(2)], [Fraction(2), Fraction(4)]])


def test_rational_function_matrices():
    a = [[parse_expr("x"), parse_expr("1")], [parse_expr("y"), parse_expr("x")]]
    ai = inverse(a, one=ONE_R, zero=ZERO_R)
    assert matmul(a, ai) == [[ONE_R, ZERO_R], [ZERO_R, ONE_R]]
    d = det(a, one=ONE_R)
    assert sympy.simplify(to_sympy(d) - sympy.Matrix([[to_sympy(v) for v in r] for r in a]).det()) == 0
