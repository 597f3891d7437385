"""Exact arithmetic over Q, Q[t], Q[u], Q(t)[u] and the field Q(t).

The algebra itself is sympy's: polynomials are elements of
``sympy.polys.rings`` rings over ``QQ`` or over the rational function field
``QQ(t)`` from ``sympy.polys.fields``. UniPolynomial and RationalFunction wrap
those elements and hand coefficients out as ``Fraction`` (or as
``RationalFunction`` for polynomials in u over Q(t)), lowest degree first.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence

from sympy import QQ
from sympy.polys.fields import field
from sympy.polys.polyerrors import ExactQuotientFailed
from sympy.polys.ring_series import rs_mul, rs_series_inversion
from sympy.polys.rings import ring

from flatdeform.errors import ArithmeticInputError, PoleError

INFINITY = math.inf

QT_FIELD, _T_GEN = field("t", QQ)
QT = QT_FIELD.to_domain()
QQ_T = QT_FIELD.ring

_RINGS = {("t", False): QQ_T}


def _ring(var: str, over_qt: bool):
    key = (var, over_qt)
    found = _RINGS.get(key)
    if found is None:
        if over_qt and var == "t":
            raise ArithmeticInputError("coefficients in Q(t) need a variable other than t")
        found = ring(var, QT if over_qt else QQ)[0]
        _RINGS[key] = found
    return found


def as_rational(value) -> Fraction:
    """Coerce int, Fraction or a string such as ``"-1/2"`` to a Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ArithmeticInputError(f"not a rational: {value!r}")
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise ArithmeticInputError(f"not a rational: {value!r}") from e
    if QQ.of_type(value):
        return _fraction(value)
    raise ArithmeticInputError(f"not a rational: {value!r}")


def _qq(value):
    c = as_rational(value)
    return QQ(c.numerator, c.denominator)


def _fraction(c) -> Fraction:
    return Fraction(int(c.numerator), int(c.denominator))


def _ground(c, over_qt: bool):
    """Coefficient as an element of QQ or of QQ(t)."""
    if isinstance(c, RationalFunction):
        if not over_qt:
            raise ArithmeticInputError(f"{c} is not a rational number")
        return c.value
    q = _qq(c)
    return QT_FIELD.ground_new(q) if over_qt else q


class UniPolynomial:
    """Univariate polynomial tagged with its variable name ("t" or "u")."""

    __slots__ = ("poly", "var", "_coeffs")

    def __init__(self, coeffs: Iterable = (), var: str = "t"):
        cs = list(coeffs)
        over_qt = any(isinstance(c, RationalFunction) for c in cs)
        terms = {}
        for k, c in enumerate(cs):
            g = _ground(c, over_qt)
            if g:
                terms[(k,)] = g
        self.poly = _ring(var, over_qt).from_dict(terms)
        self.var = var
        self._coeffs = None

    @classmethod
    def _wrap(cls, poly, var: str) -> "UniPolynomial":
        obj = cls.__new__(cls)
        obj.poly = poly
        obj.var = var
        obj._coeffs = None
        return obj

    # construction

    @classmethod
    def zero(cls, var: str = "t") -> "UniPolynomial":
        return cls((), var)

    @classmethod
    def one(cls, var: str = "t") -> "UniPolynomial":
        return cls((1,), var)

    @classmethod
    def constant(cls, c, var: str = "t") -> "UniPolynomial":
        return cls((c,), var)

    @classmethod
    def monomial(cls, c, k: int, var: str = "t") -> "UniPolynomial":
        if k < 0:
            raise ArithmeticInputError(f"negative exponent {k} in a polynomial")
        return cls([0] * k + [c], var)

    @classmethod
    def gen(cls, var: str = "t") -> "UniPolynomial":
        return cls((0, 1), var)

    # inspection

    @property
    def over_qt(self) -> bool:
        return self.poly.ring.domain.is_FractionField

    def _out(self, c):
        return RationalFunction._wrap(c) if self.over_qt else _fraction(c)

    @property
    def coeffs(self) -> tuple:
        if self._coeffs is None:
            self._coeffs = tuple(self._out(c) for c in reversed(self.poly.to_dense()))
        return self._coeffs

    @property
    def degree(self) -> int:
        """Degree, -1 for the zero polynomial."""
        return int(self.poly.degree()) if self.poly else -1

    @property
    def is_zero(self) -> bool:
        return not self.poly

    @property
    def lc(self):
        if not self.poly:
            raise ArithmeticInputError("zero polynomial has no leading coefficient")
        return self._out(self.poly.LC)

    def __getitem__(self, k: int):
        c = self.poly.get((k,))
        if c is None:
            return RationalFunction.zero() if self.over_qt else Fraction(0)
        return self._out(c)

    def valuation(self):
        """Lowest exponent with a nonzero coefficient (inf for zero)."""
        return int(self.poly.tail_degree()) if self.poly else INFINITY

    def is_constant(self) -> bool:
        return self.degree <= 0

    def is_monomial(self) -> bool:
        return len(self.poly) == 1

    # arithmetic

    def _new(self, poly) -> "UniPolynomial":
        return UniPolynomial._wrap(poly, self.var)

    def lift(self) -> "UniPolynomial":
        """The same polynomial with coefficients in Q(t)."""
        if self.over_qt:
            return self
        return self._new(self.poly.set_ring(_ring(self.var, True)))

    def _pair(self, other: "UniPolynomial"):
        if self.var != other.var:
            raise ArithmeticInputError(f"variable mismatch: {self.var} vs {other.var}")
        a, b = self.poly, other.poly
        if a.ring != b.ring:
            target = _ring(self.var, True)
            a, b = a.set_ring(target), b.set_ring(target)
        return a, b

    def _as_poly(self, other) -> "UniPolynomial":
        return other if isinstance(other, UniPolynomial) else UniPolynomial((other,), self.var)

    def __add__(self, other):
        a, b = self._pair(self._as_poly(other))
        return self._new(a + b)

    __radd__ = __add__

    def __neg__(self):
        return self._new(-self.poly)

    def __sub__(self, other):
        a, b = self._pair(self._as_poly(other))
        return self._new(a - b)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, UniPolynomial):
            return self.scale(other)
        a, b = self._pair(other)
        return self._new(a * b)

    def __rmul__(self, other):
        return self.scale(other)

    def scale(self, c) -> "UniPolynomial":
        if isinstance(c, RationalFunction) and not self.over_qt:
            return self.lift().scale(c)
        return self._new(self.poly.mul_ground(_ground(c, self.over_qt)))

    def __truediv__(self, c):
        if isinstance(c, UniPolynomial):
            return NotImplemented
        if c == 0:
            raise ArithmeticInputError("division of a polynomial by zero")
        return self.scale(c.inverse() if isinstance(c, RationalFunction) else 1 / as_rational(c))

    def __pow__(self, k: int):
        if k < 0:
            raise ArithmeticInputError("negative power of a polynomial")
        return self._new(self.poly ** k)

    def __divmod__(self, other: "UniPolynomial"):
        a, b = self._pair(other)
        if not b:
            raise ArithmeticInputError("polynomial division by zero")
        q, r = a.div(b)
        return self._new(q), self._new(r)

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "UniPolynomial") -> "UniPolynomial":
        a, b = self._pair(other)
        if not b:
            raise ArithmeticInputError("polynomial division by zero")
        try:
            return self._new(a.exquo(b))
        except ExactQuotientFailed as e:
            raise ArithmeticInputError(f"{other} does not divide {self}") from e

    def monic(self) -> "UniPolynomial":
        return self._new(self.poly.monic())

    def derivative(self) -> "UniPolynomial":
        return self._new(self.poly.diff(self.poly.ring.gens[0]))

    def shift(self, k: int) -> "UniPolynomial":
        """Multiply by var**k (k >= 0) or divide by var**-k when exact."""
        if k < 0 and self.valuation() < -k:
            raise ArithmeticInputError(f"{self} is not divisible by {self.var}^{-k}")
        return self._new(self.poly.ring.from_dict({(m + k,): c for (m,), c in self.poly.items()}))

    def evaluate(self, x):
        gen = self.poly.ring.gens[0]
        if isinstance(x, RationalFunction):
            return RationalFunction._wrap(self.lift().poly.evaluate(gen, x.value))
        if isinstance(x, (int, Fraction, str)):
            return self._out(self.poly.evaluate(gen, _ground(x, self.over_qt)))
        result = 0
        for c in reversed(self.coeffs):
            result = result * x + c
        return result

    __call__ = evaluate

    def map_coeffs(self, fn, var: str | None = None) -> "UniPolynomial":
        return UniPolynomial((fn(c) for c in self.coeffs), var or self.var)

    # comparison / display

    def __eq__(self, other):
        if isinstance(other, UniPolynomial):
            if self.var != other.var:
                return False
            a, b = self._pair(other)
            return a == b
        if self.degree <= 0:
            return self[0] == other
        return False

    def __hash__(self):
        return hash((self.var, self.coeffs))

    def __repr__(self):
        return f"UniPolynomial({self}, var={self.var!r})"

    def __str__(self):
        if self.is_zero:
            return "0"
        parts = []
        coeffs = self.coeffs
        for k in range(len(coeffs) - 1, -1, -1):
            c = coeffs[k]
            if c == 0:
                continue
            parts.append(_format_term(c, self.var, k))
        text = " + ".join(parts)
        return text.replace("+ -", "- ")


def _format_term(c, var: str, k: int) -> str:
    if isinstance(c, RationalFunction) and not c.is_constant():
        coeff = f"({c})"
        return coeff if k == 0 else f"{coeff}*{_format_power(var, k)}"
    c = c.constant_value() if isinstance(c, RationalFunction) else c
    if k == 0:
        return str(c)
    if c == 1:
        return _format_power(var, k)
    if c == -1:
        return "-" + _format_power(var, k)
    return f"{c}*{_format_power(var, k)}"


def _format_power(var: str, k: int) -> str:
    return var if k == 1 else f"{var}^{k}"


# ---------------------------------------------------------------------------
# gcd family
# ---------------------------------------------------------------------------

def _check_tags(a: UniPolynomial, b: UniPolynomial):
    if a.var != b.var:
        raise ArithmeticInputError(f"variable tags differ: {a.var} vs {b.var}")


def poly_gcd(a: UniPolynomial, b: UniPolynomial) -> UniPolynomial:
    """Monic greatest common divisor; gcd(a, 0) = monic(a), gcd(0, 0) = 0."""
    _check_tags(a, b)
    pa, pb = a._pair(b)
    if not pa and not pb:
        return a._new(pa)
    return a._new(pa.gcd(pb).monic())


def poly_lcm(a: UniPolynomial, b: UniPolynomial) -> UniPolynomial:
    _check_tags(a, b)
    pa, pb = a._pair(b)
    if not pa or not pb:
        return a._new(pa.ring.zero)
    return a._new(pa.lcm(pb).monic())


def bezout(a: UniPolynomial, b: UniPolynomial):
    """Extended Euclid.

    Returns:
        (p, q, r) with p*a + q*b = r and r = poly_gcd(a, b).
    """
    _check_tags(a, b)
    pa, pb = a._pair(b)
    if not pa and not pb:
        raise ArithmeticInputError("bezout of two zero polynomials")
    p, q, r = pa.gcdex(pb)
    return a._new(p), a._new(q), a._new(r)


def is_squarefree(g: UniPolynomial) -> bool:
    if g.is_zero:
        raise ArithmeticInputError("squarefreeness of the zero polynomial")
    return g.poly.is_squarefree


def resultant(a: UniPolynomial, b: UniPolynomial):
    """Resultant over the coefficient field (Q or Q(t))."""
    _check_tags(a, b)
    pa, pb = a._pair(b)
    holder = a._new(pa)
    if not pa or not pb:
        return holder._out(pa.ring.domain.zero)
    if pb.degree() == 0:
        return holder._out(pb.LC ** pa.degree())
    if pa.degree() == 0:
        return holder._out(pa.LC ** pb.degree())
    return holder._out(pa.resultant(pb))


def discriminant(g: UniPolynomial):
    if g.degree < 1:
        raise ArithmeticInputError("discriminant needs degree >= 1")
    return g._out(g.poly.discriminant())


# ---------------------------------------------------------------------------
# Sturm chains
# ---------------------------------------------------------------------------

def sturm_sequence(p: UniPolynomial) -> list[UniPolynomial]:
    """Sturm chain of the squarefree part of ``p``."""
    if p.is_zero:
        raise ArithmeticInputError("Sturm chain of the zero polynomial")
    if p.over_qt:
        raise ArithmeticInputError("Sturm chains need rational coefficients")
    return [p._new(q) for q in p.poly.sturm()]


def _sign_changes(seq: Sequence[UniPolynomial], x: Fraction) -> int:
    values = [v for v in (q.evaluate(x) for q in seq) if v != 0]
    return sum(1 for a, b in zip(values, values[1:]) if (a > 0) != (b > 0))


def sturm_roots_in_interval(p: UniPolynomial, lo, hi) -> int:
    """Number of distinct real roots of ``p`` in the open interval (lo, hi)."""
    lo, hi = as_rational(lo), as_rational(hi)
    if p.is_zero:
        raise ArithmeticInputError("Sturm count of the zero polynomial")
    if not lo < hi:
        raise ArithmeticInputError(f"empty interval ({lo}, {hi})")
    for end in (lo, hi):
        if p.evaluate(end) == 0:
            raise ArithmeticInputError(f"interval endpoint {end} is a root of {p}")
    return chain_root_count(sturm_sequence(p), lo, hi)


def chain_root_count(seq: Sequence[UniPolynomial], lo, hi) -> int:
    """Root count in (lo, hi) from a precomputed Sturm chain; endpoints must not be roots."""
    return _sign_changes(seq, as_rational(lo)) - _sign_changes(seq, as_rational(hi))


# ---------------------------------------------------------------------------
# Laurent polynomials
# ---------------------------------------------------------------------------

class LaurentPolynomial:
    """t**low * poly with poly(0) != 0; the zero element has low = 0."""

    __slots__ = ("low", "poly")

    def __init__(self, low: int = 0, coeffs: Iterable = ()):
        self._set(low, UniPolynomial([as_rational(c) for c in coeffs], "t"))

    def _set(self, low: int, poly: UniPolynomial):
        if poly.is_zero:
            self.low, self.poly = 0, poly
            return
        v = poly.valuation()
        self.low, self.poly = low + v, poly.shift(-v)

    @classmethod
    def _of(cls, low: int, poly: UniPolynomial) -> "LaurentPolynomial":
        obj = cls.__new__(cls)
        obj._set(low, poly)
        return obj

    @classmethod
    def monomial(cls, c, k: int) -> "LaurentPolynomial":
        return cls(k, (c,))

    @property
    def coeffs(self) -> tuple[Fraction, ...]:
        return self.poly.coeffs

    @property
    def is_zero(self) -> bool:
        return self.poly.is_zero

    def valuation(self):
        return self.low if not self.is_zero else INFINITY

    @property
    def degree(self):
        return self.low + self.poly.degree if not self.is_zero else -INFINITY

    def terms(self):
        return {self.low + j: c for j, c in enumerate(self.coeffs) if c != 0}

    def __add__(self, other):
        if not isinstance(other, LaurentPolynomial):
            other = LaurentPolynomial(0, (as_rational(other),))
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        low = min(self.low, other.low)
        return LaurentPolynomial._of(low, self.poly.shift(self.low - low) + other.poly.shift(other.low - low))

    __radd__ = __add__

    def __neg__(self):
        return LaurentPolynomial._of(self.low, -self.poly)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, LaurentPolynomial):
            return LaurentPolynomial._of(self.low, self.poly.scale(as_rational(other)))
        return LaurentPolynomial._of(self.low + other.low, self.poly * other.poly)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ArithmeticInputError("negative power of a Laurent polynomial")
        return LaurentPolynomial._of(self.low * k, self.poly ** k)

    def __eq__(self, other):
        if isinstance(other, LaurentPolynomial):
            return self.low == other.low and self.poly == other.poly
        return NotImplemented

    def __hash__(self):
        return hash((self.low, self.coeffs))

    def to_rational_function(self) -> "RationalFunction":
        return RationalFunction.from_poly(self.poly) * RationalFunction.t_power(self.low)

    @classmethod
    def from_rational_function(cls, f: "RationalFunction") -> "LaurentPolynomial":
        if not f.is_laurent():
            raise ArithmeticInputError(f"{f} is not a Laurent polynomial")
        return cls._of(-f.den.degree, f.num)

    def __repr__(self):
        return f"LaurentPolynomial({self.to_rational_function()})"


# ---------------------------------------------------------------------------
# Q(t)
# ---------------------------------------------------------------------------

def _t_poly(value):
    if value is None:
        return QQ_T.zero
    if isinstance(value, UniPolynomial):
        if value.var != "t" or value.over_qt:
            raise ArithmeticInputError(f"{value} is not a polynomial in t over Q")
        return value.poly
    return QQ_T.ground_new(_qq(value))


class RationalFunction:
    """Element of Q(t). ``num`` and ``den`` are coprime views with den monic."""

    __slots__ = ("value", "_num", "_den")

    def __init__(self, num=None, den=None):
        denom = QQ_T.one if den is None else _t_poly(den)
        if not denom:
            raise PoleError("rational function with zero denominator")
        self.value = QT_FIELD.new(_t_poly(num), denom)
        self._num = self._den = None

    @classmethod
    def _wrap(cls, value) -> "RationalFunction":
        obj = cls.__new__(cls)
        obj.value = value
        obj._num = obj._den = None
        return obj

    @classmethod
    def zero(cls) -> "RationalFunction":
        return cls._wrap(QT_FIELD.zero)

    @classmethod
    def one(cls) -> "RationalFunction":
        return cls._wrap(QT_FIELD.one)

    @classmethod
    def constant(cls, c) -> "RationalFunction":
        return cls._wrap(QT_FIELD.ground_new(_qq(c)))

    @classmethod
    def from_poly(cls, p: UniPolynomial) -> "RationalFunction":
        return cls._wrap(QT_FIELD.new(_t_poly(p)))

    @classmethod
    def t_power(cls, k: int) -> "RationalFunction":
        return cls._wrap(_T_GEN ** k)

    def _split(self):
        denom = self.value.denom
        lc = denom.LC
        self._num = UniPolynomial._wrap(self.value.numer.quo_ground(lc), "t")
        self._den = UniPolynomial._wrap(denom.monic(), "t")

    @property
    def num(self) -> UniPolynomial:
        if self._num is None:
            self._split()
        return self._num

    @property
    def den(self) -> UniPolynomial:
        if self._den is None:
            self._split()
        return self._den

    # predicates

    @property
    def is_zero(self) -> bool:
        return not self.value

    def is_polynomial(self) -> bool:
        return self.value.denom.degree() == 0

    def is_laurent(self) -> bool:
        return len(self.value.denom) == 1

    def is_constant(self) -> bool:
        return self.value.denom.degree() == 0 and self.value.numer.degree() <= 0

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise ArithmeticInputError(f"{self} is not constant")
        return self.num[0]

    # arithmetic

    @staticmethod
    def _lift(other):
        if isinstance(other, RationalFunction):
            return other.value
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QT_FIELD.ground_new(_qq(other))
        return None

    def __add__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if not o:
            return self
        return RationalFunction._wrap(self.value + o)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction._wrap(-self.value)

    def __sub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return RationalFunction._wrap(self.value - o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return RationalFunction._wrap(o - self.value)

    def __mul__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return RationalFunction._wrap(self.value * o)

    __rmul__ = __mul__

    def inverse(self) -> "RationalFunction":
        if not self.value:
            raise PoleError("division by the zero rational function")
        return RationalFunction._wrap(QT_FIELD.one / self.value)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        if not o:
            raise PoleError("division by the zero rational function")
        return RationalFunction._wrap(self.value / o)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return RationalFunction._wrap(o) * self.inverse()

    def __pow__(self, k: int):
        if k < 0 and not self.value:
            raise PoleError("negative power of the zero rational function")
        return RationalFunction._wrap(self.value ** k)

    # comparison

    def __eq__(self, other):
        o = self._lift(other)
        if o is None:
            return NotImplemented
        return self.value == o

    def __hash__(self):
        if self.is_constant():
            return hash(self.constant_value())
        return hash(self.value)

    # valuation and expansion at t = 0

    def valuation_at_zero(self):
        if not self.value:
            return INFINITY
        return int(self.value.numer.tail_degree()) - int(self.value.denom.tail_degree())

    def taylor_coefficients(self, count: int) -> list[Fraction]:
        """First ``count`` power-series coefficients at t = 0."""
        numer, denom = self.value.numer, self.value.denom
        if not denom.get(QQ_T.zero_monom):
            raise PoleError(f"{self} has a pole at t=0")
        if count <= 0:
            return []
        t = QQ_T.gens[0]
        series = rs_mul(numer, rs_series_inversion(denom, t, count), t, count)
        return [_fraction(series.get((k,), QQ.zero)) for k in range(count)]

    def taylor_coefficient(self, k: int) -> Fraction:
        if k < 0:
            raise ArithmeticInputError("Taylor index must be nonnegative")
        return self.taylor_coefficients(k + 1)[k]

    def split_at_zero(self) -> tuple[Fraction, "RationalFunction"]:
        """(zeta, xi) with self = zeta + t * xi."""
        zeta = self.taylor_coefficient(0)
        xi = (self - zeta) * RationalFunction.t_power(-1)
        return zeta, xi

    def evaluate(self, s) -> Fraction:
        s = _qq(s)
        t = QQ_T.gens[0]
        d = self.value.denom.evaluate(t, s)
        if not d:
            raise PoleError(f"{self} has a pole at t={_fraction(s)}")
        return _fraction(self.value.numer.evaluate(t, s) / d)

    __call__ = evaluate

    def __repr__(self):
        return f"RationalFunction({self})"

    def __str__(self):
        if self.den.degree == 0:
            return str(self.num)
        num = str(self.num)
        if len(self.num.coeffs) > 1 and not self.num.is_monomial():
            num = f"({num})"
        return f"{num}/({self.den})"


# ---------------------------------------------------------------------------
# module-level operations
# ---------------------------------------------------------------------------

def valuation_at_zero(f: RationalFunction):
    return f.valuation_at_zero()


def taylor_coefficient(f: RationalFunction, k: int) -> Fraction:
    return f.taylor_coefficient(k)


def evaluate(f: RationalFunction, s) -> Fraction:
    return f.evaluate(s)


def rf(value) -> RationalFunction:
    """Shorthand: lift a rational or a t-polynomial into Q(t)."""
    if isinstance(value, RationalFunction):
        return value
    if isinstance(value, UniPolynomial):
        return RationalFunction.from_poly(value)
    if isinstance(value, LaurentPolynomial):
        return value.to_rational_function()
    return RationalFunction.constant(value)
