"""Deformation engine: image basis, structure constants, special fiber,
polynomial type and relation membership.

The homomorphism f sends x and y to elements of the ambient algebra A'. Its
image is a module over O = Q[t] localized at t = 0; the image basis is an
O-basis of that module consisting of images of single words, found by
valuation-pivoted elimination.
"""
from __future__ import annotations

import hashlib
import json
import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Sequence

import numpy as np

from flatdeform.core.ambient import AmbientAlgebra, AmbientElement, SpecializedElement, flatten, specialize
from flatdeform.core.arithmetic import RationalFunction, UniPolynomial, as_rational, poly_lcm, rf
from flatdeform.core.finalg import FinAlgebra
from flatdeform.core.free_algebra import (
    FreePolynomial, Presentation, QuotientDimension, WeightedGrading, quotient_dimension,
    shortlex_rank, words_of_length,
)
from flatdeform.core.linalg import RationalSolver, RowSpace
from flatdeform.errors import BudgetExhausted, InputError, PoleError, VerificationFailed

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# the homomorphism
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HomomorphismSpec:
    ambient: AmbientAlgebra
    image_x: AmbientElement
    image_y: AmbientElement
    _images: dict = field(default_factory=dict, repr=False, compare=False)
    _vectors: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for name, image in (("f(x)", self.image_x), ("f(y)", self.image_y)):
            if image.ambient != self.ambient:
                raise InputError(f"{name} lives in a different ambient algebra")
            for coord in flatten(image):
                if not coord.is_laurent():
                    raise InputError(f"{name} has coordinate {coord} that is not a Laurent polynomial in t")

    @property
    def n(self) -> int:
        return self.ambient.n

    @property
    def pole_bound(self) -> int:
        return pole_bound(self)

    def word_image(self, w: str) -> AmbientElement:
        """f(w), memoized by prefix."""
        cached = self._images.get(w)
        if cached is not None:
            return cached
        if not w:
            value = self.ambient.identity()
        else:
            gen = self.image_x if w[-1] == "x" else self.image_y
            value = self.word_image(w[:-1]) * gen
        self._images[w] = value
        return value

    def word_vector(self, w: str) -> list[RationalFunction]:
        cached = self._vectors.get(w)
        if cached is None:
            cached = flatten(self.word_image(w))
            self._vectors[w] = cached
        return cached


def apply(f: HomomorphismSpec, p: FreePolynomial) -> AmbientElement:
    out = f.ambient.zero()
    for w, c in p.items():
        out = out + f.word_image(w).scale(c)
    return out


def _min_valuation(vector: Sequence[RationalFunction]):
    return min((c.valuation_at_zero() for c in vector), default=math.inf)


def pole_bound(f: HomomorphismSpec) -> int:
    """gamma = max(0, -min valuation over f(x), f(y) and their pairwise products)."""
    words = ("x", "y", "xx", "xy", "yx", "yy")
    lowest = min(_min_valuation(f.word_vector(w)) for w in words)
    if lowest == math.inf:
        return 0
    return max(0, -int(lowest))


# ---------------------------------------------------------------------------
# image basis
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BasisEntry:
    word: str
    image: tuple[RationalFunction, ...]
    direction: tuple[Fraction, ...]
    order: int
    pivot: int

    @property
    def q(self) -> FreePolynomial:
        return FreePolynomial.word(self.word)


@dataclass
class ImageBasis:
    entries: list[BasisEntry]
    words_scanned: int = 0
    max_length: int = 0
    _solver: RationalSolver | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return len(self.entries)

    @property
    def words(self) -> list[str]:
        return [e.word for e in self.entries]

    @property
    def orders(self) -> list[int]:
        return [e.order for e in self.entries]

    @property
    def images(self) -> list[tuple[RationalFunction, ...]]:
        return [e.image for e in self.entries]

    @property
    def solver(self) -> RationalSolver:
        if self._solver is None:
            self._solver = RationalSolver(self.images)
        return self._solver

    @property
    def determinant(self) -> UniPolynomial:
        """Determinant of the square block of images used by the solver."""
        return self.solver.determinant


class _Candidate:
    __slots__ = ("word", "raw", "raw_order", "vec", "order")

    def __init__(self, word: str, vec: list[RationalFunction]):
        self.word = word
        self.raw = tuple(vec)
        self.vec = list(vec)
        self.order = _min_valuation(self.vec)
        self.raw_order = self.order


def _leading_direction(vec: Sequence[RationalFunction], k: int) -> tuple[Fraction, ...]:
    shift = RationalFunction.t_power(-k)
    return tuple((c * shift).taylor_coefficient(0) if c.valuation_at_zero() == k else Fraction(0)
                 for c in vec)


def _echelon(items: Sequence[tuple[str, list[RationalFunction]]]) -> list[BasisEntry]:
    """Valuation-pivoted elimination over the local ring at t = 0.

    The candidate of least valuation becomes the next pivot; every other
    candidate loses its entry at the pivot coordinate by an O-multiple of it.
    Ties go to the candidate that gained the fewest t-orders through
    reduction, then to the shortlex-least word. The pivot coordinate is the
    last coordinate attaining the valuation.
    """
    pool = [_Candidate(w, v) for w, v in items]
    pool = [c for c in pool if c.order != math.inf]
    chosen: list[BasisEntry] = []
    while pool:
        best = min(pool, key=lambda c: (c.order, c.order - c.raw_order, shortlex_rank(c.word)))
        pool.remove(best)
        k = int(best.order)
        j = max(i for i, c in enumerate(best.vec) if c.valuation_at_zero() == k)
        pivot = best.vec[j]
        chosen.append(BasisEntry(
            word=best.word,
            image=best.raw,
            direction=_leading_direction(best.vec, k),
            order=k,
            pivot=j,
        ))
        survivors = []
        for cand in pool:
            a = cand.vec[j]
            if not a.is_zero:
                factor = a / pivot
                cand.vec = [x if y.is_zero else x - factor * y for x, y in zip(cand.vec, best.vec)]
                cand.order = _min_valuation(cand.vec)
            if cand.order != math.inf:
                survivors.append(cand)
        pool = survivors
    return chosen


def _closure_failures(f: HomomorphismSpec, words: Sequence[str], solver: RationalSolver) -> list[str]:
    failing: list[str] = []
    for w in words:
        for ch in ("x", "y"):
            for product in (ch + w, w + ch):
                if product in failing:
                    continue
                coeffs = solver.solve(f.word_vector(product))
                if coeffs is None or any(c.valuation_at_zero() < 0 for c in coeffs):
                    failing.append(product)
    return failing


def _identity_first(f: HomomorphismSpec, entries: list[BasisEntry],
                    solver: RationalSolver) -> tuple[list[BasisEntry], RationalSolver]:
    """Put the empty word in the first slot.

    If elimination dropped the empty word, f(1) is exchanged for a basis
    word whose coefficient in f(1) is a unit at t = 0; the O-span does not
    change. The remaining words are eliminated again among themselves so
    their orders stay nondecreasing.
    """
    if entries[0].word == "":
        return entries, solver
    words = [e.word for e in entries]
    if "" in words:
        words.remove("")
    else:
        coeffs = solver.solve(f.word_vector(""))
        unit = None
        if coeffs is not None:
            unit = next((i for i, c in enumerate(coeffs) if c.valuation_at_zero() == 0), None)
        if unit is None:
            raise VerificationFailed("f(1) is not a unit multiple of any image basis element")
        logger.debug(f"Exchanging {words[unit]!r} for the empty word")
        words.pop(unit)
    entries = _echelon([("", f.word_vector(""))]) + _echelon([(w, f.word_vector(w)) for w in words])
    return entries, RationalSolver([e.image for e in entries])


def compute_image_basis(f: HomomorphismSpec, expected_n: int | None = None,
                        word_budget: int = 400) -> ImageBasis:
    """O-basis of the image of f made of images of single words.

    Words are scanned in batches of equal length. Each pass eliminates the
    current basis words together with the new batch from scratch; the basis
    is accepted once it is closed under multiplication by f(x) and f(y) on
    both sides with coefficients regular at t = 0. The accepted basis always
    starts with the empty word; after it the orders are nondecreasing.

    Raises:
        BudgetExhausted: more than ``word_budget`` words were needed.
        InputError: the rank exceeds ``expected_n`` or the image closes at a
            smaller rank.
    """
    if expected_n is not None and not 1 <= expected_n <= f.n:
        raise InputError(f"expected dimension {expected_n} outside 1..{f.n}")
    basis_words: list[str] = []
    orders: list[int] = []
    scanned: set[str] = set()
    batch = [""]
    length = 0
    previous_rank = 0
    while True:
        generators = list(dict.fromkeys(basis_words + batch))
        scanned.update(generators)
        if len(scanned) > word_budget:
            raise BudgetExhausted(
                f"word budget {word_budget} exhausted at rank {previous_rank}",
                diagnostics={"rank": previous_rank, "words": basis_words,
                             "orders": orders})
        entries = _echelon([(w, f.word_vector(w)) for w in generators])
        rank = len(entries)
        basis_words = [e.word for e in entries]
        orders = [e.order for e in entries]
        logger.debug(f"Pass {length}: {len(generators)} words, rank {rank}, orders {orders}")
        if expected_n is not None and rank > expected_n:
            raise InputError(f"image rank {rank} exceeds the expected dimension {expected_n}")

        failing: list[str] = []
        if expected_n is None or rank == expected_n or rank == previous_rank:
            solver = RationalSolver([e.image for e in entries])
            failing = _closure_failures(f, basis_words, solver)
            if not failing:
                if expected_n is not None and rank != expected_n:
                    raise InputError(
                        f"image closes at rank {rank}, expected {expected_n}; check f(x), f(y)")
                entries, solver = _identity_first(f, entries, solver)
                orders = [e.order for e in entries]
                logger.info(f"Image basis: rank {rank} from {len(scanned)} words, "
                            f"orders {orders}")
                return ImageBasis(entries=entries, words_scanned=len(scanned),
                                  max_length=length, _solver=solver)
            logger.debug(f"Closure fails for {len(failing)} products, extending the scan")
        previous_rank = rank
        length += 1
        batch = words_of_length(length) + [w for w in failing if w not in scanned]


@dataclass(frozen=True)
class Coordinates:
    coefficients: tuple[RationalFunction, ...]

    @property
    def pole_free(self) -> bool:
        return all(c.valuation_at_zero() >= 0 for c in self.coefficients)

    def zeta(self) -> list[Fraction]:
        return [c.taylor_coefficient(0) for c in self.coefficients]


def express_in_basis(v: Sequence[RationalFunction], basis: ImageBasis) -> Coordinates:
    """Unique Q(t) coordinates of v in the basis images.

    Raises:
        VerificationFailed: v is not in the Q(t)-span of the images.
    """
    coeffs = basis.solver.solve([rf(x) for x in v])
    if coeffs is None:
        raise VerificationFailed("vector is outside the span of the image basis")
    return Coordinates(tuple(coeffs))


# ---------------------------------------------------------------------------
# deformation tables
# ---------------------------------------------------------------------------

def _rf_export(c: RationalFunction) -> dict:
    return {"num": [str(x) for x in c.num.coeffs], "den": [str(x) for x in c.den.coeffs]}


class DeformationTable:
    """c[i, k, m](t): coefficient of d_i in d_k *_t d_m."""

    def __init__(self, c: np.ndarray, labels: Sequence[str] | None = None,
                 identity: Sequence[RationalFunction] | None = None):
        c = np.asarray(c, dtype=object)
        if c.ndim != 3 or len(set(c.shape)) != 1:
            raise InputError(f"deformation table must be n x n x n, got {c.shape}")
        self.c = c
        self.n = c.shape[0]
        self.labels = tuple(labels) if labels is not None else tuple(f"d{i + 1}" for i in range(self.n))
        if identity is None:
            identity = [RationalFunction.one()] + [RationalFunction.zero()] * (self.n - 1)
        self.identity = tuple(rf(x) for x in identity)

    def entries(self):
        for i in range(self.n):
            for k in range(self.n):
                for m in range(self.n):
                    yield i, k, m, self.c[i, k, m]

    def pole_at_zero(self):
        """First (i, k, m) whose entry has a pole at t = 0, or None."""
        for i, k, m, value in self.entries():
            if value.valuation_at_zero() < 0:
                return i, k, m
        return None

    def validate(self):
        bad = self.pole_at_zero()
        if bad is not None:
            raise PoleError(f"structure constant c{bad} = {self.c[bad]} has a pole at t=0")

    def zeta(self) -> np.ndarray:
        out = np.empty(self.c.shape, dtype=object)
        for i, k, m, value in self.entries():
            out[i, k, m] = value.taylor_coefficient(0)
        return out

    def xi(self, i: int, k: int, m: int) -> RationalFunction:
        return self.c[i, k, m].split_at_zero()[1]

    def identity_zeta(self) -> list[Fraction]:
        return [x.taylor_coefficient(0) for x in self.identity]

    def identity_witness(self):
        """First (i, k, side) violating the identity laws as Q(t) identities."""
        e = self.identity
        for i in range(self.n):
            for k in range(self.n):
                left = sum((e[j] * self.c[i, j, k] for j in range(self.n) if not e[j].is_zero),
                           RationalFunction.zero())
                right = sum((e[j] * self.c[i, k, j] for j in range(self.n) if not e[j].is_zero),
                            RationalFunction.zero())
                target = RationalFunction.one() if i == k else RationalFunction.zero()
                if left != target:
                    return i, k, "left"
                if right != target:
                    return i, k, "right"
        return None

    def denominators(self) -> list[UniPolynomial]:
        seen = []
        for *_, value in self.entries():
            if value.den.degree > 0 and value.den not in seen:
                seen.append(value.den)
        return seen

    def to_export(self) -> dict:
        return {
            "n": self.n,
            "labels": list(self.labels),
            "identity": [_rf_export(x) for x in self.identity],
            "entries": [
                {"i": i, "k": k, "m": m, **_rf_export(value)}
                for i, k, m, value in self.entries() if not value.is_zero
            ],
        }

    def digest(self) -> str:
        text = json.dumps(self.to_export(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(text.encode("utf-8")).hexdigest()

    def __eq__(self, other):
        if not isinstance(other, DeformationTable):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.c, other.c) and self.identity == other.identity


def structure_constants(f: HomomorphismSpec, basis: ImageBasis) -> DeformationTable:
    """Express every product f(q_k) f(q_m) in the image basis.

    Raises:
        VerificationFailed: a coefficient has a pole at t = 0.
    """
    n = basis.n
    c = np.empty((n, n, n), dtype=object)
    words = basis.words
    for k, wk in enumerate(words):
        for m, wm in enumerate(words):
            coords = express_in_basis(f.word_vector(wk + wm), basis)
            for i, value in enumerate(coords.coefficients):
                if value.valuation_at_zero() < 0:
                    raise VerificationFailed(
                        f"structure constant c({i},{k},{m}) = {value} has a pole at t=0",
                        witness=(i, k, m))
                c[i, k, m] = value
    identity = express_in_basis(f.word_vector(""), basis).coefficients
    table = DeformationTable(c, labels=words, identity=identity)
    logger.info(f"Structure constants: {n}^3 entries, {len(table.denominators())} distinct denominators")
    return table


def special_fiber(table: DeformationTable) -> FinAlgebra:
    zeta = table.zeta()
    identity = table.identity_zeta()
    index = identity.index(1) if identity.count(0) == table.n - 1 and 1 in identity else None
    return FinAlgebra(zeta, identity_index=index, identity=identity)


def specialize_family(table: DeformationTable, s) -> FinAlgebra:
    """The algebra with constants c(s).

    Raises:
        PoleError: some entry has a pole at s.
    """
    s = as_rational(s)
    out = np.empty(table.c.shape, dtype=object)
    for i, k, m, value in table.entries():
        out[i, k, m] = value.evaluate(s)
    identity = [x.evaluate(s) for x in table.identity]
    index = identity.index(1) if identity.count(0) == table.n - 1 and 1 in identity else None
    return FinAlgebra(out, identity_index=index, identity=identity)


@dataclass(frozen=True)
class AssociativityResult:
    ok: bool
    witness: tuple[int, int, int] | None = None

    def __bool__(self):
        return self.ok


@dataclass
class PolyTypeTable:
    """sigma = h * c with h(0) = 1; d_k o_t d_m = sum_i sigma[i, k, m](t) d_i."""

    h: UniPolynomial
    sigma: np.ndarray

    @property
    def n(self) -> int:
        return self.sigma.shape[0]

    def at_zero(self) -> np.ndarray:
        out = np.empty(self.sigma.shape, dtype=object)
        for idx, value in np.ndenumerate(self.sigma):
            out[idx] = value[0]
        return out

    def to_export(self) -> dict:
        return {
            "n": self.n,
            "h": [str(x) for x in self.h.coeffs],
            "entries": [
                {"i": i, "k": k, "m": m, "sigma": [str(x) for x in value.coeffs]}
                for (i, k, m), value in np.ndenumerate(self.sigma) if not value.is_zero
            ],
        }


def to_polynomial_type(table: DeformationTable) -> PolyTypeTable:
    table.validate()
    h = UniPolynomial.one("t")
    for den in table.denominators():
        h = poly_lcm(h, den)
    h = h / h[0]
    sigma = np.empty(table.c.shape, dtype=object)
    for i, k, m, value in table.entries():
        sigma[i, k, m] = value.num * h.exact_div(value.den)
    logger.info(f"Polynomial type: h of degree {h.degree}")
    return PolyTypeTable(h=h, sigma=sigma)


def check_associativity_formal(table: DeformationTable) -> AssociativityResult:
    """Associativity of *_t as identities in Q(t).

    Both sides are compared after clearing denominators: with sigma = h c the
    identity sum_j c[j,a,b] c[i,j,c] = sum_j c[j,b,c] c[i,a,j] becomes a
    polynomial identity in the sigma table.
    """
    h = UniPolynomial.one("t")
    for den in table.denominators():
        h = poly_lcm(h, den)
    n = table.n
    sigma = [[[table.c[i, k, m].num * h.exact_div(table.c[i, k, m].den) for m in range(n)]
              for k in range(n)] for i in range(n)]
    zero = UniPolynomial.zero("t")
    # slices[k][i][m] = sigma[i][k][m]: the left-multiplication matrix of d_k
    slices = [[[sigma[i][k][m] for m in range(n)] for i in range(n)] for k in range(n)]
    for a in range(n):
        for b in range(n):
            for c in range(n):
                for i in range(n):
                    left = zero
                    right = zero
                    for j in range(n):
                        sab = sigma[j][a][b]
                        if not sab.is_zero:
                            sjc = slices[j][i][c]
                            if not sjc.is_zero:
                                left = left + sab * sjc
                        sbc = sigma[j][b][c]
                        if not sbc.is_zero:
                            saj = slices[a][i][j]
                            if not saj.is_zero:
                                right = right + sbc * saj
                    if left != right:
                        logger.info(f"Formal associativity fails at ({a}, {b}, {c}), component {i}")
                        return AssociativityResult(False, (a, b, c))
    return AssociativityResult(True)


def relation_in_Jprime(f: HomomorphismSpec, basis: ImageBasis, r: FreePolynomial) -> bool:
    """True iff f(r) lies in t * Im(f)."""
    coords = express_in_basis(flatten(apply(f, r)), basis)
    return all(c.valuation_at_zero() >= 1 for c in coords.coefficients)


def fiber_generators(f: HomomorphismSpec, basis: ImageBasis) -> list[list[Fraction]]:
    """Images of x and y in the special fiber, as coordinate vectors."""
    out = []
    for w in ("x", "y"):
        coords = express_in_basis(f.word_vector(w), basis)
        if not coords.pole_free:
            raise VerificationFailed(f"f({w}) has coordinates with a pole at t=0")
        out.append(coords.zeta())
    return out


@dataclass
class PresentationVerdict:
    verdict: Literal["isomorphic", "inconclusive"]
    quotient: QuotientDimension
    memberships: dict[str, bool]
    reason: str = ""


def verify_presentation(f: HomomorphismSpec, basis: ImageBasis, rels: Presentation,
                        g: WeightedGrading, degree_bound: int) -> PresentationVerdict:
    """Check that Q<x,y>/<rels> presents the special fiber.

    Raises:
        VerificationFailed: some relation is not in J'.
    """
    memberships = {str(r): relation_in_Jprime(f, basis, r) for r in rels.relations}
    failing = [text for text, ok in memberships.items() if not ok]
    if failing:
        raise VerificationFailed(
            "relations not in J': " + "; ".join(failing), witness=failing)
    quotient = quotient_dimension(rels, g, degree_bound)
    if not quotient.exact:
        return PresentationVerdict("inconclusive", quotient, memberships, quotient.reason)
    if quotient.dimension != basis.n:
        reason = f"quotient has dimension {quotient.dimension}, fiber has {basis.n}"
        logger.warning(f"Presentation: {reason}")
        return PresentationVerdict("inconclusive", quotient, memberships, reason)
    logger.info(f"✓ Presentation verified: dimension {quotient.dimension}")
    return PresentationVerdict("isomorphic", quotient, memberships)


def generation_dimension_at(f: HomomorphismSpec, s, extra: Sequence[str] = ()) -> int:
    """Dimension of the unital Q-algebra generated by f(x)(s), f(y)(s) and
    the values of any extra words."""
    gens: list[SpecializedElement] = [specialize(f.image_x, s), specialize(f.image_y, s)]
    gens.extend(specialize(f.word_image(w), s) for w in extra)
    unit = specialize(f.ambient.identity(), s)
    width = len(unit.vector())
    span = RowSpace(width)
    queue = [unit]
    while queue:
        value = queue.pop()
        if span.add(value.vector()):
            queue.extend(g * value for g in gens)
    return span.dimension


def structure_residuals(f: HomomorphismSpec, basis: ImageBasis, table: DeformationTable) -> list[tuple[int, int]]:
    """(k, m) pairs where f(q_k q_m) differs from sum_i c[i,k,m] f(q_i)."""
    bad = []
    words = basis.words
    for k, wk in enumerate(words):
        for m, wm in enumerate(words):
            target = f.word_vector(wk + wm)
            for row, value in enumerate(target):
                acc = RationalFunction.zero()
                for i, image in enumerate(basis.images):
                    if not table.c[i, k, m].is_zero and not image[row].is_zero:
                        acc = acc + table.c[i, k, m] * image[row]
                if acc != value:
                    bad.append((k, m))
                    break
    return bad


def recheck_closure(f: HomomorphismSpec, basis: ImageBasis, max_length: int) -> list[str]:
    """Words of length <= max_length whose images are not O-combinations of the basis."""
    bad = []
    for length in range(max_length + 1):
        for w in words_of_length(length):
            coeffs = basis.solver.solve(f.word_vector(w))
            if coeffs is None or any(c.valuation_at_zero() < 0 for c in coeffs):
                bad.append(w)
    return bad
