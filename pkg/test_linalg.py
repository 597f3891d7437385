"""Exact linear algebra over Q and Q[t]."""
import random
from fractions import Fraction

import pytest
import sympy

from flatdeform.core.arithmetic import RationalFunction, UniPolynomial
from flatdeform.core.linalg import (
    RationalSolver, RowSpace, bareiss_determinant, bareiss_inverse, nullspace, rank, solve_in_span,
)
from flatdeform.errors import ArithmeticInputError

t = UniPolynomial.gen("t")
T = sympy.Symbol("t")


def to_expr(p: UniPolynomial):
    return sum(sympy.Rational(c.numerator, c.denominator) * T ** k for k, c in enumerate(p.coeffs))


def test_rank_and_nullspace():
    rows = [[1, 2, 3], [2, 4, 6], [0, 1, 1]]
    assert rank(rows) == 2
    kernel = nullspace(rows, 3)
    assert len(kernel) == 1
    v = kernel[0]
    assert all(sum(Fraction(a) * b for a, b in zip(row, v)) == 0 for row in rows)


def test_solve_in_span():
    basis = [[1, 0, 1], [0, 1, 1]]
    assert solve_in_span(basis, [2, 3, 5]) == [2, 3]
    assert solve_in_span(basis, [1, 1, 1]) is None


def test_row_space():
    span = RowSpace(3)
    assert span.add([1, 1, 0])
    assert not span.add([2, 2, 0])
    assert span.contains([Fraction(1, 2), Fraction(1, 2), 0])
    assert span.dimension == 1


def test_bareiss_determinant_matches_sympy():
    rng = random.Random(4)
    for size in (1, 2, 3, 4):
        matrix = [[UniPolynomial([rng.randint(-3, 3) for _ in range(3)], "t") for _ in range(size)]
                  for _ in range(size)]
        expected = sympy.Matrix([[to_expr(p) for p in row] for row in matrix]).det()
        assert sympy.expand(to_expr(bareiss_determinant(matrix)) - expected) == 0


def test_bareiss_determinant_of_singular_matrix():
    assert bareiss_determinant([[t, t * t], [1, t]]).is_zero


def test_bareiss_inverse():
    matrix = [[t, UniPolynomial.one()], [UniPolynomial.zero(), t + 1]]
    d, adj = bareiss_inverse(matrix)
    for i in range(2):
        for j in range(2):
            entry = sum((matrix[i][k] * adj[k][j] for k in range(2)), UniPolynomial.zero())
            assert entry == (d if i == j else 0)
    with pytest.raises(ArithmeticInputError):
        bareiss_inverse([[t, t], [t, t]])


def test_rational_solver():
    one = RationalFunction.one()
    inv = RationalFunction(UniPolynomial.one(), t)
    columns = [[one, RationalFunction(t), RationalFunction.zero()],
               [RationalFunction.zero(), one, inv]]
    solver = RationalSolver(columns)
    target = [RationalFunction(2), RationalFunction(t * 2) + 3, inv * 3]
    assert solver.solve(target) == [RationalFunction(2), RationalFunction(3)]
    assert solver.solve([one, one, one]) is None
    with pytest.raises(ArithmeticInputError):
        RationalSolver([columns[0], columns[0]])
