"""Exact linear algebra.

Elimination is delegated to sympy's ``DomainMatrix`` over QQ, QQ[t] or QQ(t).
Over Q the results come back as numpy object arrays of ``Fraction``; RowSpace
keeps its own small echelon form since it grows one vector at a time.
"""
from __future__ import annotations

from fractions import Fraction
from functools import reduce
from typing import Sequence

import numpy as np
from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from flatdeform.core.arithmetic import QT, RationalFunction, UniPolynomial, poly_lcm
from flatdeform.errors import ArithmeticInputError


def to_fraction_array(rows, width: int | None = None) -> np.ndarray:
    rows = list(rows)
    if not rows:
        return np.empty((0, width or 0), dtype=object)
    out = np.empty((len(rows), len(rows[0])), dtype=object)
    for i, row in enumerate(rows):
        for j, value in enumerate(row):
            out[i, j] = Fraction(value)
    return out


def zero_vector(n: int) -> np.ndarray:
    out = np.empty(n, dtype=object)
    out[:] = Fraction(0)
    return out


def is_zero_vector(v) -> bool:
    return all(x == 0 for x in v)


def _qq(value):
    f = Fraction(value)
    return QQ(f.numerator, f.denominator)


def _fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


# ---------------------------------------------------------------------------
# Q
# ---------------------------------------------------------------------------

def _qq_matrix(rows) -> DomainMatrix:
    rows = [list(row) for row in rows]
    return DomainMatrix([[_qq(x) for x in row] for row in rows], (len(rows), len(rows[0])), QQ)


def rref(rows) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over Q; returns (nonzero rows, pivot columns)."""
    rows = list(rows)
    if not rows or not len(rows[0]):
        return to_fraction_array(rows), []
    reduced, pivots = _qq_matrix(rows).rref()
    nonzero = reduced.to_list()[:len(pivots)]
    return to_fraction_array([[_fraction(c) for c in row] for row in nonzero], len(rows[0])), list(pivots)


def rank(rows) -> int:
    return len(rref(rows)[1])


def nullspace(rows, ncols: int) -> list[np.ndarray]:
    """Basis of {v : M v = 0} for the matrix with the given rows."""
    rows = list(rows)
    if not rows:
        return [_unit(ncols, j) for j in range(ncols)]
    r, pivots = rref(rows)
    free = [j for j in range(ncols) if j not in pivots]
    basis = []
    for f in free:
        v = _unit(ncols, f)
        for row, p in zip(r, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def _unit(n: int, j: int) -> np.ndarray:
    v = zero_vector(n)
    v[j] = Fraction(1)
    return v


class RowSpace:
    """Incrementally grown subspace of Q^width kept in echelon form."""

    def __init__(self, width: int):
        self.width = width
        self._rows: dict[int, np.ndarray] = {}
        self._order: list[int] = []

    def __len__(self):
        return len(self._rows)

    @property
    def dimension(self) -> int:
        return len(self._rows)

    def reduce(self, v) -> np.ndarray:
        w = np.array([Fraction(x) for x in v], dtype=object)
        for p in self._order:
            if w[p] != 0:
                w = w - w[p] * self._rows[p]
        return w

    def contains(self, v) -> bool:
        return is_zero_vector(self.reduce(v))

    def add(self, v) -> bool:
        """Insert v; True if it enlarged the space."""
        w = self.reduce(v)
        p = next((j for j, x in enumerate(w) if x != 0), None)
        if p is None:
            return False
        self._rows[p] = w / w[p]
        self._order = sorted(self._rows)
        return True

    def basis(self) -> list[np.ndarray]:
        return [self._rows[p] for p in self._order]


def solve_in_span(basis: Sequence, v) -> list[Fraction] | None:
    """Coefficients expressing v in the given independent vectors, or None."""
    if not basis:
        return [] if is_zero_vector(v) else None
    k = len(basis)
    n = len(v)
    # columns are the basis vectors, augmented by v
    rows = [[basis[j][i] for j in range(k)] + [v[i]] for i in range(n)]
    r, pivots = rref(rows)
    if k in pivots:
        return None
    coeffs = [Fraction(0)] * k
    for row, p in zip(r, pivots):
        coeffs[p] = row[k]
    return coeffs


# ---------------------------------------------------------------------------
# Q[t]
# ---------------------------------------------------------------------------

def _poly_matrix(matrix):
    """DomainMatrix over the polynomial ring of the entries (or QQ), and a result wrapper."""
    rows = [list(row) for row in matrix]
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ArithmeticInputError("expected a square matrix")
    sample = next((x for row in rows for x in row if isinstance(x, UniPolynomial)), None)
    if sample is None:
        return _qq_matrix(rows) if n else None, _fraction
    ring, var = sample.poly.ring, sample.var

    def entry(x):
        if isinstance(x, UniPolynomial):
            if x.var != var or x.poly.ring != ring:
                raise ArithmeticInputError(f"mixed polynomial rings in one matrix: {x}")
            return x.poly
        return ring.ground_new(_qq(x))

    dm = DomainMatrix([[entry(x) for x in row] for row in rows], (n, n), ring.to_domain())
    return dm, lambda p: UniPolynomial._wrap(p, var)


def bareiss_determinant(matrix):
    """Determinant of a square matrix over Q[t] (or Q), fraction-free."""
    dm, wrap = _poly_matrix(matrix)
    if dm is None:
        return Fraction(1)
    return wrap(dm.det())


def bareiss_inverse(matrix):
    """Adjugate and determinant.

    Returns:
        (d, R) with matrix @ R = d * I, d = det(matrix) != 0.

    Raises:
        ArithmeticInputError: the matrix is singular.
    """
    dm, wrap = _poly_matrix(matrix)
    if dm is None:
        return Fraction(1), []
    adj, det = dm.adj_det()
    if not det:
        raise ArithmeticInputError("singular matrix in fraction-free solve")
    return wrap(det), [[wrap(x) for x in row] for row in adj.to_list()]


def _common_denominator(column: Sequence[RationalFunction]) -> RationalFunction:
    dens = [f.den for f in column if f.den.degree > 0]
    return RationalFunction.from_poly(reduce(poly_lcm, dens, UniPolynomial.one("t")))


class RationalSolver:
    """Solves M c = v over Q(t) for a fixed full-column-rank matrix M.

    M is given by its columns (each a sequence of RationalFunction). A
    nonsingular square block of rows is chosen and inverted once, so repeated
    solves are a matrix-vector product followed by a residual check on all
    rows.
    """

    def __init__(self, columns: Sequence[Sequence[RationalFunction]]):
        self.columns = [list(col) for col in columns]
        self.r = len(self.columns)
        self.m = len(self.columns[0]) if self.columns else 0
        self.rows: list[int] = []
        self.determinant = UniPolynomial.one("t")
        if not self.r:
            return
        transposed = DomainMatrix([[f.value for f in col] for col in self.columns], (self.r, self.m), QT)
        self.rows = list(transposed.rref()[1])
        if len(self.rows) != self.r:
            raise ArithmeticInputError(
                f"columns are dependent over Q(t): rank {len(self.rows)} < {self.r}")
        block = transposed.extract(list(range(self.r)), self.rows).transpose()
        self._inverse = block.inv()
        # det of the block after clearing each column's denominators
        scale = reduce(lambda a, b: a * b, (_common_denominator(col) for col in self.columns))
        self.determinant = (RationalFunction._wrap(block.det()) * scale).num

    def solve(self, v: Sequence[RationalFunction]) -> list[RationalFunction] | None:
        """Unique solution, or None when v is outside the column span."""
        if self.r == 0:
            return [] if all(x == 0 for x in v) else None
        sub = DomainMatrix([[v[i].value] for i in self.rows], (self.r, 1), QT)
        coeffs = [RationalFunction._wrap(row[0]) for row in (self._inverse * sub).to_list()]
        for i in range(self.m):
            acc = RationalFunction.zero()
            for j in range(self.r):
                if coeffs[j].is_zero or self.columns[j][i].is_zero:
                    continue
                acc = acc + coeffs[j] * self.columns[j][i]
            if acc != v[i]:
                return None
        return coeffs
