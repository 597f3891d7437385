"""Words and polynomials in the free algebra on {x, y}, shortlex order,
weighted gradings and bounded-degree quotients by two-sided ideals.
"""
from __future__ import annotations

import heapq
import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping

from flatdeform.core.arithmetic import RationalFunction, rf
from flatdeform.errors import InputError

logger = logging.getLogger(__name__)

Word = str
LETTERS = ("x", "y")


def check_word(w: Word) -> Word:
    if any(ch not in LETTERS for ch in w):
        raise InputError(f"word {w!r} uses letters outside {{x, y}}")
    return w


def shortlex_key(w: Word) -> tuple[int, str]:
    # "x" < "y" in code-point order, so plain string comparison is the
    # lexicographic part
    return len(w), w


def shortlex_compare(a: Word, b: Word) -> int:
    """-1, 0 or 1 as a is less than, equal to or greater than b."""
    ka, kb = shortlex_key(a), shortlex_key(b)
    return (ka > kb) - (ka < kb)


def shortlex_rank(w: Word) -> int:
    """Zero-based position of w in the shortlex enumeration."""
    value = 0
    for ch in w:
        value = 2 * value + (ch == "y")
    return (1 << len(w)) - 1 + value


def words_of_length(n: int) -> list[Word]:
    return ["".join(p) for p in itertools.product(LETTERS, repeat=n)]


def iter_words():
    for n in itertools.count():
        yield from words_of_length(n)


def shortlex_enumerate(count: int) -> list[Word]:
    return list(itertools.islice(iter_words(), count))


def format_word(w: Word) -> str:
    if not w:
        return "1"
    parts = []
    for letter, run in itertools.groupby(w):
        k = len(list(run))
        parts.append(letter if k == 1 else f"{letter}^{k}")
    return "*".join(parts)


@dataclass(frozen=True)
class WeightedGrading:
    weight_x: int = 1
    weight_y: int = 1

    def __post_init__(self):
        if self.weight_x < 1 or self.weight_y < 1:
            raise InputError(f"weights must be positive, got ({self.weight_x}, {self.weight_y})")

    def degree(self, w: Word) -> int:
        ny = w.count("y")
        return self.weight_x * (len(w) - ny) + self.weight_y * ny

    def column_key(self, w: Word):
        """Term order used for leading words: weighted degree, then shortlex."""
        return self.degree(w), len(w), w

    def words_up_to(self, bound: int) -> list[Word]:
        """All words of weighted degree <= bound, increasing in ``column_key``."""
        out: list[Word] = []
        frontier = [""]
        while frontier:
            out.extend(frontier)
            frontier = [w + ch for w in frontier for ch in LETTERS
                        if self.degree(w + ch) <= bound]
        out.sort(key=self.column_key)
        return out


def weighted_degree(w: Word, g: WeightedGrading) -> int:
    return g.degree(w)


class FreePolynomial:
    """Finite Q(t)-linear combination of words; immutable."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[Word, object] | None = None):
        clean: dict[Word, RationalFunction] = {}
        for w, c in (terms or {}).items():
            c = rf(c)
            if not c.is_zero:
                clean[check_word(w)] = c
        self._terms = clean
        self._hash = None

    @classmethod
    def word(cls, w: Word, coeff=1) -> "FreePolynomial":
        return cls({w: coeff})

    @classmethod
    def one(cls) -> "FreePolynomial":
        return cls({"": 1})

    @classmethod
    def zero(cls) -> "FreePolynomial":
        return cls()

    @property
    def terms(self) -> dict[Word, RationalFunction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def support(self) -> list[Word]:
        return sorted(self._terms, key=shortlex_key)

    def coefficient(self, w: Word) -> RationalFunction:
        return self._terms.get(w, RationalFunction.zero())

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def leading_word(self) -> Word:
        return max(self._terms, key=shortlex_key)

    def weighted_degree(self, g: WeightedGrading) -> int:
        return max((g.degree(w) for w in self._terms), default=0)

    def is_constant_in_t(self) -> bool:
        return all(c.is_constant() for c in self._terms.values())

    def rational_terms(self) -> dict[Word, Fraction]:
        if not self.is_constant_in_t():
            raise InputError(f"{self} has coefficients depending on t")
        return {w: c.constant_value() for w, c in self._terms.items()}

    def map_coefficients(self, fn) -> "FreePolynomial":
        return FreePolynomial({w: fn(c) for w, c in self._terms.items()})

    def __add__(self, other):
        if not isinstance(other, FreePolynomial):
            other = FreePolynomial.one() * other
        out = dict(self._terms)
        for w, c in other._terms.items():
            out[w] = out[w] + c if w in out else c
        return FreePolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return FreePolynomial({w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, FreePolynomial):
            c = rf(other)
            return FreePolynomial({w: a * c for w, a in self._terms.items()})
        out: dict[Word, RationalFunction] = {}
        for u, a in self._terms.items():
            for v, b in other._terms.items():
                w = u + v
                out[w] = out[w] + a * b if w in out else a * b
        return FreePolynomial(out)

    def __rmul__(self, other):
        return self * other

    def __pow__(self, k: int):
        result = FreePolynomial.one()
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other):
        if isinstance(other, FreePolynomial):
            return self._terms == other._terms
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        return f"FreePolynomial({self})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for w in self.support():
            c = self._terms[w]
            mono = format_word(w)
            if not c.is_constant():
                parts.append(f"({c})" if not w else f"({c})*{mono}")
                continue
            value = c.constant_value()
            if not w:
                parts.append(str(value))
            elif value == 1:
                parts.append(mono)
            elif value == -1:
                parts.append(f"-{mono}")
            else:
                parts.append(f"{value}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


X = FreePolynomial.word("x")
Y = FreePolynomial.word("y")


@dataclass(frozen=True)
class Presentation:
    relations: tuple[FreePolynomial, ...]

    def __post_init__(self):
        object.__setattr__(self, "relations", tuple(self.relations))
        for r in self.relations:
            if r.is_zero:
                raise InputError("presentation contains a zero relation")
            if not r.is_constant_in_t():
                raise InputError(f"relation {r} has coefficients depending on t")

    def max_degree(self, g: WeightedGrading) -> int:
        return max((r.weighted_degree(g) for r in self.relations), default=0)


# ---------------------------------------------------------------------------
# bounded quotients
# ---------------------------------------------------------------------------

@dataclass
class QuotientDimension:
    """Result of a bounded quotient computation.

    ``basis`` holds the standard words (those that are not leading words of
    the truncated ideal). ``exact`` is True only when the closure certificate
    holds; otherwise ``dimension`` is the count at this bound and ``reason``
    says which check failed.
    """

    dimension: int
    exact: bool
    basis: tuple[Word, ...]
    grading: WeightedGrading
    degree_bound: int
    reason: str = ""
    algebra: object = None
    _pivots: dict = field(default_factory=dict, repr=False)
    _rank: dict = field(default_factory=dict, repr=False)
    _order: list = field(default_factory=list, repr=False)

    def reduce_terms(self, terms: Mapping[Word, Fraction]) -> dict[Word, Fraction]:
        """Full reduction of a Q-combination of words within the bound."""
        row = {w: Fraction(c) for w, c in terms.items() if c != 0}
        heap = [-self._rank[w] for w in row]
        heapq.heapify(heap)
        out: dict[Word, Fraction] = {}
        while heap:
            w = self._order[-heapq.heappop(heap)]
            c = row.pop(w, None)
            if c is None or c == 0:
                continue
            piv = self._pivots.get(w)
            if piv is None:
                out[w] = c
                continue
            for w2, a in piv.items():
                if w2 == w:
                    continue
                if w2 not in row:
                    heapq.heappush(heap, -self._rank[w2])
                    row[w2] = -c * a
                else:
                    row[w2] -= c * a
        return out

    def normal_form(self, p: FreePolynomial) -> FreePolynomial:
        terms = p.rational_terms()
        inside = {w: c for w, c in terms.items() if w in self._rank}
        outside = {w: c for w, c in terms.items() if w not in self._rank}
        result = self.reduce_terms(inside)
        if outside:
            if not self.exact or self.algebra is None:
                raise InputError(
                    f"{p} involves words above degree {self.degree_bound} and the quotient is not certified")
            # above the bound: multiply out in the certified quotient algebra
            gens = [self.coordinates(FreePolynomial.word(ch)) for ch in LETTERS]
            for w, c in outside.items():
                vec = self.algebra.evaluate(FreePolynomial.word(w), gens)
                for b, a in zip(self.basis, vec):
                    if a != 0:
                        result[b] = result.get(b, Fraction(0)) + c * a
        return FreePolynomial(result)

    def coordinates(self, p: FreePolynomial) -> list[Fraction]:
        nf = self.normal_form(p).rational_terms()
        return [nf.get(b, Fraction(0)) for b in self.basis]


def _max_by_rank(row, rank):
    return max(row, key=rank.__getitem__)


def _top_reduce(row: dict, pivots: dict, rank: dict):
    while row:
        lead = _max_by_rank(row, rank)
        piv = pivots.get(lead)
        if piv is None:
            return lead
        c = row[lead]
        for w, a in piv.items():
            value = row.get(w, 0) - c * a
            if value:
                row[w] = value
            else:
                row.pop(w, None)
    return None


@lru_cache(maxsize=16)
def _quotient(pres: Presentation, g: WeightedGrading, degree_bound: int) -> QuotientDimension:
    rels = [r.rational_terms() for r in pres.relations]
    rel_degrees = [max(g.degree(w) for w in r) for r in rels]
    if rels and degree_bound < max(rel_degrees):
        raise InputError(
            f"degree bound {degree_bound} is smaller than the largest relation degree {max(rel_degrees)}")

    order = g.words_up_to(degree_bound)
    rank = {w: i for i, w in enumerate(order)}
    logger.debug(f"Quotient: {len(order)} words up to weighted degree {degree_bound}")

    # rows u*r*v are generated in nondecreasing weighted degree and only
    # independent rows are extended by a letter on either side
    pivots: dict[Word, dict[Word, Fraction]] = {}
    heap = [(d, idx, "", idx, "") for idx, d in enumerate(rel_degrees)]
    heapq.heapify(heap)
    seen = {("", idx, "") for idx in range(len(rels))}
    counter = len(rels)
    while heap:
        d, _, u, idx, v = heapq.heappop(heap)
        row = {u + w + v: c for w, c in rels[idx].items()}
        lead = _top_reduce(row, pivots, rank)
        if lead is None:
            continue
        c = row[lead]
        pivots[lead] = {w: a / c for w, a in row.items()}
        for ch in LETTERS:
            step = g.degree(ch)
            if d + step > degree_bound:
                continue
            for item in ((ch + u, idx, v), (u, idx, v + ch)):
                if item not in seen:
                    seen.add(item)
                    counter += 1
                    heapq.heappush(heap, (d + step, counter) + item)

    basis = tuple(w for w in order if w not in pivots)
    result = QuotientDimension(
        dimension=len(basis), exact=False, basis=basis, grading=g,
        degree_bound=degree_bound, _pivots=pivots, _rank=rank, _order=order)
    logger.info(f"Quotient: {len(pivots)} ideal rows, {len(basis)} standard words")
    _certify(result, pres, g, degree_bound)
    return result


def _certify(q: QuotientDimension, pres: Presentation, g: WeightedGrading, bound: int):
    from flatdeform.core.finalg import FinAlgebra, generated_subalgebra_dim

    if not q.basis:
        q.exact, q.reason = True, ""
        return
    top = max(g.degree(w) for w in q.basis)
    # products of two standard words and their one-letter extensions must be reduced below the bound
    reach = max(2 * top, top + max(g.degree(ch) for ch in LETTERS))
    if reach > bound:
        q.reason = f"standard words of degree {top} need reductions up to degree {reach} > bound {bound}"
        return
    if q.basis[0] != "":
        q.reason = "the identity word is not a standard word"
        return

    n = len(q.basis)
    index = {w: i for i, w in enumerate(q.basis)}
    constants = [[[Fraction(0)] * n for _ in range(n)] for _ in range(n)]
    for k, a in enumerate(q.basis):
        for m, b in enumerate(q.basis):
            for w, c in q.reduce_terms({a + b: Fraction(1)}).items():
                constants[index[w]][k][m] = c
    algebra = FinAlgebra.from_nested(constants, identity_index=0)
    witness = algebra.associativity_witness()
    if witness is not None:
        q.reason = f"quotient table is not associative at {witness}"
        return
    if not algebra.check_identity():
        q.reason = "the identity word does not act as identity"
        return
    gens = [[Fraction(int(w == ch)) for w in q.basis] for ch in LETTERS]
    for ch, vec in zip(LETTERS, gens):
        if ch not in index:
            reduced = q.reduce_terms({ch: Fraction(1)})
            vec[:] = [reduced.get(w, Fraction(0)) for w in q.basis]
    for r in pres.relations:
        if any(x != 0 for x in algebra.evaluate(r, gens)):
            q.reason = f"relation {r} does not vanish in the quotient table"
            return
    if generated_subalgebra_dim(algebra, gens) != n:
        q.reason = "x and y do not generate the quotient table"
        return
    q.exact = True
    q.algebra = algebra


def quotient_dimension(p: Presentation, g: WeightedGrading, degree_bound: int) -> QuotientDimension:
    """Dimension of Q<x,y>/<relations> from words of weighted degree <= degree_bound."""
    if degree_bound < 1:
        raise InputError("degree bound must be positive")
    result = _quotient(p, g, degree_bound)
    if not result.exact:
        logger.warning(f"Quotient dimension {result.dimension} is a lower bound only: {result.reason}")
    return result


def normal_form(p: FreePolynomial, pres: Presentation, g: WeightedGrading,
                degree_bound: int) -> FreePolynomial:
    return quotient_dimension(pres, g, degree_bound).normal_form(p)


def same_normal_forms(first: QuotientDimension, second: QuotientDimension,
                      words: Iterable[Word] | None = None) -> bool:
    """True when both quotients are certified and agree on every given word.

    By default the words are all products of two standard words of ``first``.
    """
    if not (first.exact and second.exact) or first.basis != second.basis:
        return False
    if words is None:
        words = {a + b for a in first.basis for b in first.basis}
    for w in words:
        p = FreePolynomial.word(w)
        if first.normal_form(p) != second.normal_form(p):
            logger.info(f"Normal forms differ at {format_word(w)}")
            return False
    return True
