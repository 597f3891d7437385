"""Finite-dimensional associative Q-algebras given by structure constants.

``constants[i, k, m]`` is the coefficient of ``d_i`` in ``d_k * d_m``.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from flatdeform.core.linalg import RowSpace, nullspace, zero_vector
from flatdeform.errors import InputError, VerificationFailed

logger = logging.getLogger(__name__)


class FinAlgebra:
    def __init__(self, constants: np.ndarray, identity_index: int | None = 0,
                 identity: Sequence | None = None):
        constants = np.asarray(constants, dtype=object)
        if constants.ndim != 3 or len(set(constants.shape)) != 1 or constants.shape[0] < 1:
            raise InputError(f"structure constants must be dim x dim x dim, got {constants.shape}")
        self.constants = constants
        self.dim = constants.shape[0]
        if identity is not None:
            self.identity = np.array([Fraction(x) for x in identity], dtype=object)
            self.identity_index = identity_index
        else:
            if identity_index is None or not 0 <= identity_index < self.dim:
                raise InputError("an identity index or identity vector is required")
            self.identity_index = identity_index
            self.identity = self.basis_vector(identity_index)

    @classmethod
    def from_nested(cls, nested, identity_index: int | None = 0, identity=None) -> "FinAlgebra":
        n = len(nested)
        constants = np.empty((n, n, n), dtype=object)
        for i in range(n):
            for k in range(n):
                for m in range(n):
                    constants[i, k, m] = Fraction(nested[i][k][m])
        return cls(constants, identity_index, identity)

    def basis_vector(self, i: int) -> np.ndarray:
        v = zero_vector(self.dim)
        v[i] = Fraction(1)
        return v

    def vector(self, values) -> np.ndarray:
        return np.array([Fraction(x) for x in values], dtype=object)

    def left_matrix(self, a) -> np.ndarray:
        """Matrix of b -> a*b; column m is a * d_m."""
        out = np.empty((self.dim, self.dim), dtype=object)
        out[:] = Fraction(0)
        for k, ak in enumerate(a):
            if ak != 0:
                out = out + ak * self.constants[:, k, :]
        return out

    def right_matrix(self, b) -> np.ndarray:
        """Matrix of a -> a*b; column k is d_k * b."""
        b = np.asarray(b, dtype=object)
        out = np.empty((self.dim, self.dim), dtype=object)
        for k in range(self.dim):
            out[:, k] = self.constants[:, k, :].dot(b)
        return out

    def multiply(self, a, b) -> np.ndarray:
        return self.left_matrix(a).dot(np.asarray(b, dtype=object))

    def evaluate(self, p, gens: Sequence) -> np.ndarray:
        """Value of a free polynomial with rational coefficients at (x, y) = gens."""
        gens = [np.asarray(g, dtype=object) for g in gens]
        lefts = {"x": self.left_matrix(gens[0]), "y": self.left_matrix(gens[1])}
        cache: dict[str, np.ndarray] = {"": self.identity}

        def word_value(w: str) -> np.ndarray:
            if w not in cache:
                cache[w] = lefts[w[0]].dot(word_value(w[1:]))
            return cache[w]

        out = zero_vector(self.dim)
        for w, c in p.rational_terms().items():
            out = out + c * word_value(w)
        return out

    def associativity_witness(self):
        """First basis triple (a, b, c) with (ab)c != a(bc), or None."""
        lefts = [self.constants[:, k, :] for k in range(self.dim)]
        for a in range(self.dim):
            for b in range(self.dim):
                first = self.left_matrix(self.constants[:, a, b])
                second = lefts[a].dot(lefts[b])
                if not np.array_equal(first, second):
                    for c in range(self.dim):
                        if not np.array_equal(first[:, c], second[:, c]):
                            return a, b, c
        return None

    def check_identity(self) -> bool:
        eye = np.identity(self.dim, dtype=object)
        return (np.array_equal(self.left_matrix(self.identity), eye)
                and np.array_equal(self.right_matrix(self.identity), eye))

    def __eq__(self, other):
        if not isinstance(other, FinAlgebra):
            return NotImplemented
        return (self.dim == other.dim and np.array_equal(self.constants, other.constants)
                and np.array_equal(self.identity, other.identity))

    def __repr__(self):
        return f"FinAlgebra(dim={self.dim})"


def matrix_algebra(size: int) -> FinAlgebra:
    """M_size(Q) in the row-major matrix-unit basis."""
    n = size * size
    constants = np.empty((n, n, n), dtype=object)
    constants[:] = Fraction(0)
    for a in range(size):
        for b in range(size):
            for d in range(size):
                constants[a * size + d, a * size + b, b * size + d] = Fraction(1)
    identity = [Fraction(int(i // size == i % size)) for i in range(n)]
    return FinAlgebra(constants, identity_index=0 if size == 1 else None, identity=identity)


def commutative_algebra(dim: int) -> FinAlgebra:
    """Q^dim with the basis of orthogonal idempotents."""
    constants = np.empty((dim, dim, dim), dtype=object)
    constants[:] = Fraction(0)
    for i in range(dim):
        constants[i, i, i] = Fraction(1)
    return FinAlgebra(constants, identity_index=None, identity=[1] * dim)


def direct_product(first: FinAlgebra, second: FinAlgebra) -> FinAlgebra:
    n1, n = first.dim, first.dim + second.dim
    constants = np.empty((n, n, n), dtype=object)
    constants[:] = Fraction(0)
    constants[:n1, :n1, :n1] = first.constants
    constants[n1:, n1:, n1:] = second.constants
    identity = list(first.identity) + list(second.identity)
    return FinAlgebra(constants, identity_index=None, identity=identity)


def check_associative(algebra: FinAlgebra) -> bool:
    witness = algebra.associativity_witness()
    if witness is not None:
        logger.info(f"Associativity fails at basis triple {witness}")
    return witness is None


def trace_form(algebra: FinAlgebra) -> np.ndarray:
    """T[i, j] = trace of left multiplication by d_i * d_j."""
    c = algebra.constants
    n = algebra.dim
    tau = [sum((c[l, k, l] for l in range(n)), Fraction(0)) for k in range(n)]
    out = np.empty((n, n), dtype=object)
    for i in range(n):
        for j in range(n):
            out[i, j] = sum((c[k, i, j] * tau[k] for k in range(n) if tau[k] != 0), Fraction(0))
    return out


def radical(algebra: FinAlgebra) -> list[np.ndarray]:
    """Jacobson radical as the kernel of the trace form (characteristic zero)."""
    n = algebra.dim
    basis = nullspace(trace_form(algebra), n)
    if not basis:
        return []
    span = RowSpace(n)
    for v in basis:
        span.add(v)
    for v in basis:
        for k in range(n):
            d = algebra.basis_vector(k)
            if not (span.contains(algebra.multiply(d, v)) and span.contains(algebra.multiply(v, d))):
                raise VerificationFailed("trace-form kernel is not a two-sided ideal", witness=k)
    power = list(basis)
    for _ in range(n):
        nxt = RowSpace(n)
        for a in power:
            for b in basis:
                nxt.add(algebra.multiply(a, b))
        power = nxt.basis()
        if not power:
            return basis
    raise VerificationFailed("trace-form kernel is not nilpotent")


def center(algebra: FinAlgebra) -> list[np.ndarray]:
    n = algebra.dim
    c = algebra.constants
    rows = []
    for k in range(n):
        for i in range(n):
            row = [c[i, j, k] - c[i, k, j] for j in range(n)]
            if any(x != 0 for x in row):
                rows.append(row)
    return nullspace(rows, n)


def wedderburn_shapes(dim: int, blocks: int) -> list[tuple[int, ...]]:
    """Nonincreasing tuples of positive sizes with sum of squares dim."""
    out: list[tuple[int, ...]] = []

    def extend(prefix: tuple[int, ...], remaining: int, left: int, cap: int):
        if left == 0:
            if remaining == 0:
                out.append(prefix)
            return
        for size in range(min(cap, math.isqrt(remaining)), 0, -1):
            rest = remaining - size * size
            if rest >= left - 1:
                extend(prefix + (size,), rest, left - 1, size)

    if blocks >= 1:
        extend((), dim, blocks, dim)
    return out


@dataclass(frozen=True)
class StructureReport:
    dim: int
    radical_dim: int
    center_dim: int
    semisimple: bool
    shape_candidates: tuple[tuple[int, ...], ...] = ()

    @property
    def shape(self) -> tuple[int, ...] | None:
        """The complex block shape when the invariants pin it down."""
        if len(self.shape_candidates) == 1:
            return self.shape_candidates[0]
        return None

    def summary(self) -> str:
        shape = self.shape
        if shape is not None:
            shape_text = "{" + ",".join(map(str, shape)) + "}"
        elif self.shape_candidates:
            shape_text = "one of " + ", ".join("{" + ",".join(map(str, s)) + "}" for s in self.shape_candidates)
        else:
            shape_text = "n/a"
        return (f"dim {self.dim}, radical {self.radical_dim}, center {self.center_dim}, "
                f"{'semisimple' if self.semisimple else 'not semisimple'}, shape {shape_text}")


def structure_report(algebra: FinAlgebra) -> StructureReport:
    rad = radical(algebra)
    cen = center(algebra)
    semisimple = not rad
    shapes = wedderburn_shapes(algebra.dim, len(cen)) if semisimple else []
    report = StructureReport(
        dim=algebra.dim,
        radical_dim=len(rad),
        center_dim=len(cen),
        semisimple=semisimple,
        shape_candidates=tuple(shapes),
    )
    logger.debug(f"Structure report: {report.summary()}")
    return report


def generated_subalgebra_dim(algebra: FinAlgebra, gens: Sequence) -> int:
    """Dimension of the unital subalgebra generated by ``gens``."""
    gens = [np.asarray(g, dtype=object) for g in gens]
    lefts = [algebra.left_matrix(g) for g in gens]
    span = RowSpace(algebra.dim)
    queue = [algebra.identity]
    while queue:
        v = queue.pop()
        if span.add(v):
            queue.extend(left.dot(v) for left in lefts)
    return span.dimension
