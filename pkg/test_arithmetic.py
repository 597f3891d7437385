"""Exact arithmetic against sympy as an oracle."""
import math
import random
from fractions import Fraction

import pytest
import sympy

from flatdeform.core.arithmetic import (
    LaurentPolynomial, RationalFunction, UniPolynomial, as_rational, bezout, discriminant, is_squarefree,
    poly_gcd, poly_lcm, resultant, sturm_roots_in_interval,
)
from flatdeform.errors import ArithmeticInputError, PoleError

T = sympy.Symbol("t")


def to_sympy(p: UniPolynomial) -> sympy.Poly:
    coeffs = [sympy.Rational(c.numerator, c.denominator) for c in reversed(p.coeffs)] or [0]
    return sympy.Poly(coeffs, T, domain=sympy.QQ)


def from_sympy(p: sympy.Poly) -> UniPolynomial:
    coeffs = [Fraction(int(c.p), int(c.q)) for c in reversed(p.all_coeffs())]
    return UniPolynomial(coeffs, "t")


def random_poly(rng: random.Random, max_degree: int = 5) -> UniPolynomial:
    while True:
        degree = rng.randint(0, max_degree)
        coeffs = [Fraction(rng.randint(-6, 6), rng.randint(1, 3)) for _ in range(degree + 1)]
        p = UniPolynomial(coeffs, "t")
        if not p.is_zero:
            return p


def random_pairs(count: int, seed: int = 11):
    rng = random.Random(seed)
    for _ in range(count):
        common = random_poly(rng, 2)
        yield random_poly(rng) * common, random_poly(rng) * common


def test_as_rational_accepts_strings_and_rejects_floats():
    assert as_rational("-1/2") == Fraction(-1, 2)
    assert as_rational(3) == Fraction(3)
    with pytest.raises(ArithmeticInputError):
        as_rational(0.5)
    with pytest.raises(ArithmeticInputError):
        as_rational("1/0")


def test_gcd_matches_sympy():
    for a, b in random_pairs(60):
        expected = from_sympy(sympy.gcd(to_sympy(a), to_sympy(b)).monic())
        assert poly_gcd(a, b) == expected


def test_gcd_edge_cases():
    t = UniPolynomial.gen("t")
    assert poly_gcd(UniPolynomial.zero(), UniPolynomial.zero()).is_zero
    assert poly_gcd(t * 3 + 6, UniPolynomial.zero()) == t + 2
    assert poly_gcd(t ** 3, t ** 2 + t) == t
    assert poly_lcm(t, t + 1) == t ** 2 + t


def test_bezout_identity():
    for a, b in random_pairs(40, seed=3):
        p, q, r = bezout(a, b)
        assert p * a + q * b == r
        assert r == poly_gcd(a, b)


def test_resultant_and_discriminant_match_sympy():
    rng = random.Random(5)
    for _ in range(40):
        a, b = random_poly(rng), random_poly(rng)
        if a.degree < 1 or b.degree < 1:
            continue
        assert resultant(a, b) == Fraction(str(to_sympy(a).resultant(to_sympy(b))))
        assert discriminant(a) == Fraction(str(to_sympy(a).discriminant()))


def test_squarefree():
    t = UniPolynomial.gen("t")
    assert is_squarefree(t ** 2 - 1)
    assert not is_squarefree((t - 1) ** 2 * (t + 2))
    with pytest.raises(ArithmeticInputError):
        is_squarefree(UniPolynomial.zero())


def test_sturm_counts_match_sympy():
    rng = random.Random(17)
    checked = 0
    while checked < 30:
        p = random_poly(rng, 6)
        if p.degree < 1:
            continue
        lo, hi = Fraction(rng.randint(-9, 0), 2), Fraction(rng.randint(1, 9), 3)
        if p.evaluate(lo) == 0 or p.evaluate(hi) == 0:
            continue
        # sympy counts distinct roots in the closed interval; endpoints are not roots here
        expected = to_sympy(p).count_roots(sympy.Rational(lo.numerator, lo.denominator),
                                           sympy.Rational(hi.numerator, hi.denominator))
        assert sturm_roots_in_interval(p, lo, hi) == expected
        checked += 1


def test_sturm_rejects_root_at_endpoint():
    t = UniPolynomial.gen("t")
    with pytest.raises(ArithmeticInputError):
        sturm_roots_in_interval(t - 1, 0, 1)


def test_rational_function_normal_form():
    t = UniPolynomial.gen("t")
    f = RationalFunction(t ** 2 - 1, (t - 1) * 2)
    assert f == RationalFunction((t + 1) / 2)
    assert f.den == UniPolynomial.one()
    g = RationalFunction(t, t * t + t)
    assert g.num == UniPolynomial.one() and g.den == t + 1
    with pytest.raises(PoleError):
        RationalFunction(t, UniPolynomial.zero())


def test_field_axioms_on_samples():
    rng = random.Random(23)
    for _ in range(25):
        a = RationalFunction(random_poly(rng, 3), random_poly(rng, 2))
        b = RationalFunction(random_poly(rng, 3), random_poly(rng, 2))
        assert (a + b) - b == a
        assert (a * b) / b == a
        assert a * (b + 1) == a * b + a


def test_valuation_and_taylor():
    t = UniPolynomial.gen("t")
    f = RationalFunction(t ** 2, t + 1)
    assert f.valuation_at_zero() == 2
    # t^2/(1+t) = t^2 - t^3 + t^4 - ...
    assert f.taylor_coefficients(5) == [0, 0, 1, -1, 1]
    g = RationalFunction(UniPolynomial.one(), t)
    assert g.valuation_at_zero() == -1
    with pytest.raises(PoleError):
        g.taylor_coefficient(0)
    zeta, xi = RationalFunction(t + 3, 1 - t).split_at_zero()
    assert zeta == 3
    assert zeta + RationalFunction(t) * xi == RationalFunction(t + 3, 1 - t)


def test_evaluate_rejects_poles():
    t = UniPolynomial.gen("t")
    f = RationalFunction(UniPolynomial.one(), t - Fraction(1, 2))
    assert f.evaluate(1) == 2
    with pytest.raises(PoleError):
        f.evaluate(Fraction(1, 2))


def test_laurent_round_trip_through_rational_functions():
    p = LaurentPolynomial(-2, [1, 0, Fraction(-1, 2)])
    f = p.to_rational_function()
    assert f.valuation_at_zero() == -2
    assert LaurentPolynomial.from_rational_function(f) == p
    assert (p * LaurentPolynomial.monomial(1, 2)).valuation() == 0


def test_taylor_expansion_agrees_with_evaluation():
    rng = random.Random(31)
    t = RationalFunction.t_power(1)
    checked = 0
    while checked < 25:
        num, den = random_poly(rng, 4), random_poly(rng, 3)
        s = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        if den.evaluate(0) == 0 or den.evaluate(s) == 0:
            continue
        f = RationalFunction(num, den)
        order = rng.randint(0, 5)
        coeffs = f.taylor_coefficients(order + 1)
        head = sum((c * t ** k for k, c in enumerate(coeffs)), RationalFunction.zero())
        remainder = (f - head) / t ** (order + 1)
        assert remainder.valuation_at_zero() >= 0
        expected = sum(c * s ** k for k, c in enumerate(coeffs)) + s ** (order + 1) * remainder.evaluate(s)
        assert f.evaluate(s) == expected
        checked += 1


def test_valuation_is_additive_under_products():
    rng = random.Random(37)
    for _ in range(40):
        a = RationalFunction(random_poly(rng, 3), random_poly(rng, 3)) * RationalFunction.t_power(rng.randint(-3, 3))
        b = RationalFunction(random_poly(rng, 3), random_poly(rng, 3)) * RationalFunction.t_power(rng.randint(-3, 3))
        assert (a * b).valuation_at_zero() == a.valuation_at_zero() + b.valuation_at_zero()
    assert (RationalFunction.zero() * RationalFunction.t_power(-2)).valuation_at_zero() == math.inf


def test_polynomials_over_rational_functions():
    u = UniPolynomial([RationalFunction.zero(), RationalFunction.one()], "u")
    g = u * u - RationalFunction.t_power(2)
    assert g.over_qt and g.lc == 1
    q, r = divmod(g, u - RationalFunction.t_power(1))
    assert r.is_zero
    assert q == u + RationalFunction.t_power(1)
    assert discriminant(g) == RationalFunction.t_power(2) * 4
    assert g.evaluate(RationalFunction.t_power(1)) == 0
