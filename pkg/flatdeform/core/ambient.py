"""The target algebra A' = (+)_i B_i (x) Q(t)[u]/(g_i(u)).

Elements are stored block by block: for every basis element of B_i one
polynomial in u of degree < d_i with Q(t) coefficients. ``flatten`` lists the
coordinates block-major, then basis-element-major (row-major matrix units for
matrix blocks), then by u-power.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

from flatdeform.core.arithmetic import RationalFunction, UniPolynomial, as_rational, is_squarefree, rf
from flatdeform.core.finalg import FinAlgebra, matrix_algebra
from flatdeform.errors import InputError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BlockAlgebra:
    kind: Literal["matrix", "table"]
    size: int = 1
    table: FinAlgebra | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind == "matrix":
            if self.size < 1:
                raise InputError(f"matrix block size must be positive, got {self.size}")
            object.__setattr__(self, "table", matrix_algebra(self.size))
        elif self.kind == "table":
            if self.table is None:
                raise InputError("table block without structure constants")
            witness = self.table.associativity_witness()
            if witness is not None:
                raise InputError(f"table block is not associative at basis triple {witness}")
            if not self.table.check_identity():
                raise InputError("table block identity is not two-sided")
            object.__setattr__(self, "size", self.table.dim)
        else:
            raise InputError(f"unknown block kind {self.kind!r}")

    @classmethod
    def matrix(cls, size: int) -> "BlockAlgebra":
        return cls("matrix", size)

    @classmethod
    def from_table(cls, table: FinAlgebra) -> "BlockAlgebra":
        return cls("table", table.dim, table)

    @property
    def dim_B(self) -> int:
        return self.size * self.size if self.kind == "matrix" else self.table.dim

    def representation(self) -> list[np.ndarray]:
        """Matrices of the basis elements: matrix units, or left-regular matrices."""
        if self.kind == "matrix":
            out = []
            for p in range(self.dim_B):
                e = np.empty((self.size, self.size), dtype=object)
                e[:] = Fraction(0)
                e[divmod(p, self.size)] = Fraction(1)
                out.append(e)
            return out
        return [self.table.left_matrix(self.table.basis_vector(p)) for p in range(self.dim_B)]

    def __hash__(self):
        if self.kind == "matrix":
            return hash(("matrix", self.size))
        return hash(("table", self.table.dim, tuple(self.table.constants.flat)))

    def __eq__(self, other):
        if not isinstance(other, BlockAlgebra):
            return NotImplemented
        return self.kind == other.kind and self.size == other.size and self.table == other.table


@dataclass(frozen=True)
class BlockSpec:
    algebra: BlockAlgebra
    min_poly: UniPolynomial

    def __post_init__(self):
        g = self.min_poly
        if g.var != "u":
            raise InputError(f"minimal polynomial must be in u, got variable {g.var}")
        g = g.map_coeffs(rf)
        object.__setattr__(self, "min_poly", g)
        if g.degree < 1:
            raise InputError(f"minimal polynomial {g} must have positive degree in u")
        if g.lc != 1:
            raise InputError(f"minimal polynomial {g} is not monic in u")
        if g[0] == 0:
            raise InputError(f"minimal polynomial {g} is divisible by u")
        for c in g.coeffs:
            if not c.is_polynomial():
                raise InputError(f"minimal polynomial {g} has coefficients outside Q[t]")
        if not is_squarefree(g):
            raise InputError(f"minimal polynomial {g} is not squarefree over Q(t)")

    @property
    def d(self) -> int:
        return self.min_poly.degree

    @property
    def width(self) -> int:
        return self.algebra.dim_B * self.d

    def at(self, s) -> UniPolynomial:
        """g_{i,s}: the minimal polynomial with t replaced by s."""
        s = as_rational(s)
        return specialize_poly(self.min_poly, s)


def squarefree_at(spec: BlockSpec, s) -> bool:
    return is_squarefree(spec.at(s))


def companion_matrix(g: UniPolynomial) -> np.ndarray:
    """Companion matrix of a monic polynomial over Q: ones below the diagonal,
    last column -(a_0, ..., a_{d-1})."""
    if g.degree < 1 or g.lc != 1:
        raise InputError(f"companion matrix needs a monic polynomial of positive degree, got {g}")
    d = g.degree
    c = np.empty((d, d), dtype=object)
    c[:] = Fraction(0)
    for i in range(1, d):
        c[i, i - 1] = Fraction(1)
    for i in range(d):
        c[i, d - 1] = -g[i]
    return c


def evaluate_at_matrix(p: UniPolynomial, matrix: np.ndarray) -> np.ndarray:
    d = matrix.shape[0]
    eye = np.identity(d, dtype=object) * Fraction(1)
    out = np.empty((d, d), dtype=object)
    out[:] = Fraction(0)
    for c in reversed(p.coeffs):
        out = out.dot(matrix) + eye * c
    return out


class AmbientAlgebra:
    def __init__(self, blocks: Sequence[BlockSpec]):
        if not blocks:
            raise InputError("ambient algebra needs at least one block")
        self.blocks = tuple(blocks)
        self.offsets = []
        offset = 0
        for block in self.blocks:
            self.offsets.append(offset)
            offset += block.width
        self.n = offset

    def __eq__(self, other):
        if not isinstance(other, AmbientAlgebra):
            return NotImplemented
        return self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        return f"AmbientAlgebra(n={self.n}, blocks={len(self.blocks)})"

    def element(self, blocks: Sequence[Sequence]) -> "AmbientElement":
        """Build an element from per-block coordinate lists of u-polynomials."""
        if len(blocks) != len(self.blocks):
            raise InputError(f"expected {len(self.blocks)} blocks, got {len(blocks)}")
        values = []
        for spec, coords in zip(self.blocks, blocks):
            coords = list(coords)
            if len(coords) != spec.algebra.dim_B:
                raise InputError(f"block expects {spec.algebra.dim_B} coordinates, got {len(coords)}")
            values.append(tuple(_reduce(_as_u_poly(c), spec.min_poly) for c in coords))
        return AmbientElement(self, tuple(values))

    def zero(self) -> "AmbientElement":
        return self.element([[_U_ZERO] * spec.algebra.dim_B for spec in self.blocks])

    def identity(self) -> "AmbientElement":
        blocks = []
        for spec in self.blocks:
            unit = spec.algebra.table.identity
            blocks.append([UniPolynomial.constant(rf(c), "u") for c in unit])
        return self.element(blocks)


_U_ZERO = UniPolynomial.zero("u")


def _as_u_poly(value) -> UniPolynomial:
    if isinstance(value, UniPolynomial):
        if value.var != "u":
            raise InputError(f"block entry {value} is not a polynomial in u")
        return value.map_coeffs(rf)
    return UniPolynomial.constant(rf(value), "u")


def _reduce(p: UniPolynomial, g: UniPolynomial) -> UniPolynomial:
    if p.degree < g.degree:
        return p
    return p % g


@dataclass(frozen=True)
class AmbientElement:
    ambient: AmbientAlgebra = field(repr=False)
    blocks: tuple[tuple[UniPolynomial, ...], ...]

    def _check(self, other: "AmbientElement"):
        if self.ambient is not other.ambient and self.ambient != other.ambient:
            raise InputError("elements belong to different ambient algebras")

    def __add__(self, other: "AmbientElement") -> "AmbientElement":
        self._check(other)
        return AmbientElement(self.ambient, tuple(
            tuple(a + b for a, b in zip(x, y)) for x, y in zip(self.blocks, other.blocks)))

    def __neg__(self):
        return AmbientElement(self.ambient, tuple(tuple(-a for a in x) for x in self.blocks))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c) -> "AmbientElement":
        c = rf(c)
        return AmbientElement(self.ambient, tuple(tuple(a.scale(c) for a in x) for x in self.blocks))

    def __mul__(self, other):
        if isinstance(other, AmbientElement):
            return ambient_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    @property
    def is_zero(self) -> bool:
        return all(a.is_zero for x in self.blocks for a in x)

    def flatten(self) -> list[RationalFunction]:
        return flatten(self)

    def __str__(self):
        parts = []
        for i, x in enumerate(self.blocks):
            parts.append(f"block {i + 1}: [" + ", ".join(str(a) for a in x) + "]")
        return "; ".join(parts)


def ambient_mul(a: AmbientElement, b: AmbientElement) -> AmbientElement:
    a._check(b)
    out = []
    for spec, x, y in zip(a.ambient.blocks, a.blocks, b.blocks):
        constants = spec.algebra.table.constants
        dim = spec.algebra.dim_B
        acc = [_U_ZERO] * dim
        for p, xp in enumerate(x):
            if xp.is_zero:
                continue
            for q, yq in enumerate(y):
                if yq.is_zero:
                    continue
                prod = None
                for r in range(dim):
                    c = constants[r, p, q]
                    if c == 0:
                        continue
                    if prod is None:
                        prod = _reduce(xp * yq, spec.min_poly)
                    acc[r] = acc[r] + prod.scale(c)
        out.append(tuple(acc))
    return AmbientElement(a.ambient, tuple(out))


def flatten(a: AmbientElement) -> list[RationalFunction]:
    out: list[RationalFunction] = []
    for spec, x in zip(a.ambient.blocks, a.blocks):
        for poly in x:
            out.extend(rf(poly[j]) for j in range(spec.d))
    return out


class SpecializedElement:
    """Tuple of Q block matrices; the value of an ambient element at t = s."""

    def __init__(self, matrices: Sequence[np.ndarray]):
        self.matrices = tuple(matrices)

    def __mul__(self, other: "SpecializedElement") -> "SpecializedElement":
        return SpecializedElement(a.dot(b) for a, b in zip(self.matrices, other.matrices))

    def __add__(self, other: "SpecializedElement") -> "SpecializedElement":
        return SpecializedElement(a + b for a, b in zip(self.matrices, other.matrices))

    def __eq__(self, other):
        if not isinstance(other, SpecializedElement):
            return NotImplemented
        return len(self.matrices) == len(other.matrices) and all(
            np.array_equal(a, b) for a, b in zip(self.matrices, other.matrices))

    def vector(self) -> list[Fraction]:
        return [x for m in self.matrices for x in m.flat]


def specialize(a: AmbientElement, s) -> SpecializedElement:
    """Substitute t = s and u_i = companion matrix of g_{i,s}."""
    s = as_rational(s)
    matrices = []
    for spec, x in zip(a.ambient.blocks, a.blocks):
        g_s = spec.at(s)
        if not is_squarefree(g_s):
            raise InputError(f"g at t={s} is not squarefree: {g_s}; choose a smaller s")
        comp = companion_matrix(g_s)
        d = spec.d
        rep = spec.algebra.representation()
        size = rep[0].shape[0]
        out = np.empty((size * d, size * d), dtype=object)
        out[:] = Fraction(0)
        for p, poly in enumerate(x):
            if poly.is_zero:
                continue
            value = evaluate_at_matrix(specialize_poly(poly, s), comp)
            for r in range(size):
                for c in range(size):
                    if rep[p][r, c] != 0:
                        out[r * d:(r + 1) * d, c * d:(c + 1) * d] += rep[p][r, c] * value
        matrices.append(out)
    return SpecializedElement(matrices)


def specialize_poly(p: UniPolynomial, s) -> UniPolynomial:
    """Replace t by s in the Q(t) coefficients of a polynomial in u."""
    s = as_rational(s)
    return p.map_coeffs(lambda c: rf(c).evaluate(s))
