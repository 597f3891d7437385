"""Words, shortlex order and bounded quotients of the free algebra."""
import random
from fractions import Fraction

import pytest

from flatdeform.core.free_algebra import (
    FreePolynomial, Presentation, WeightedGrading, format_word, normal_form, quotient_dimension,
    same_normal_forms, shortlex_compare, shortlex_enumerate, shortlex_rank,
)
from flatdeform.errors import InputError
from flatdeform.utils.expression import parse_relation
from flatdeform.utils.problem import a8_relations, grading_of, presentation_of

A8_WORDS = ["", "x", "xx", "xxx", "xxxx", "y", "xy", "xxy"]


def random_word(rng: random.Random) -> str:
    return "".join(rng.choice("xy") for _ in range(rng.randint(0, 6)))


def test_shortlex_is_a_total_order():
    rng = random.Random(2024)
    for _ in range(1000):
        a, b, c = random_word(rng), random_word(rng), random_word(rng)
        assert shortlex_compare(a, b) == -shortlex_compare(b, a)
        assert (shortlex_compare(a, b) == 0) == (a == b)
        if shortlex_compare(a, b) < 0 and shortlex_compare(b, c) < 0:
            assert shortlex_compare(a, c) < 0
        # compatible with concatenation on both sides
        if shortlex_compare(a, b) < 0:
            assert shortlex_compare(c + a, c + b) < 0
            assert shortlex_compare(a + c, b + c) < 0


def test_shortlex_enumeration_and_rank():
    words = shortlex_enumerate(15)
    assert words[:7] == ["", "x", "y", "xx", "xy", "yx", "yy"]
    assert [shortlex_rank(w) for w in words] == list(range(15))


def test_format_word():
    assert format_word("") == "1"
    assert format_word("xxxy") == "x^3*y"
    assert format_word("yxy") == "y*x*y"


def test_free_polynomial_arithmetic():
    x, y = FreePolynomial.word("x"), FreePolynomial.word("y")
    p = (x + y) * (x - y)
    assert p == FreePolynomial({"xx": 1, "yx": 1, "xy": -1, "yy": -1})
    assert str(x * y + y * x) == "x*y + y*x"
    assert (x ** 3).support() == ["xxx"]
    assert (p - p).is_zero


def test_a8_groebner_quotient_has_dimension_eight():
    rels = a8_relations()
    q = quotient_dimension(presentation_of(rels), grading_of(rels.weights), rels.bound)
    assert q.exact, q.reason
    assert q.dimension == 8
    assert sorted(q.basis) == sorted(A8_WORDS)


def test_a8_normal_forms():
    rels = a8_relations()
    pres, g = presentation_of(rels), grading_of(rels.weights)
    assert normal_form(parse_relation("y*x"), pres, g, rels.bound) == parse_relation("-x*y")
    assert normal_form(parse_relation("y^2"), pres, g, rels.bound) == parse_relation("-x^3 - x^2")
    assert normal_form(parse_relation("x^5 + 2"), pres, g, rels.bound) == parse_relation("2")


def test_unbounded_quotient_is_not_certified():
    q = quotient_dimension(Presentation((parse_relation("x*y - y*x"),)), WeightedGrading(), 6)
    assert not q.exact
    assert q.reason


def test_commutative_polynomial_quotient():
    # Q[x]/(x^2 - 1) with y = x
    pres = Presentation((parse_relation("x^2 - 1"), parse_relation("y - x")))
    q = quotient_dimension(pres, WeightedGrading(), 8)
    assert q.exact
    assert q.dimension == 2
    assert q.coordinates(parse_relation("y^3")) == [Fraction(0), Fraction(1)]


def test_bound_below_relation_degree_is_an_input_error():
    rels = a8_relations()
    with pytest.raises(InputError):
        quotient_dimension(presentation_of(rels), grading_of(rels.weights), 15)


def test_zero_relation_is_rejected():
    with pytest.raises(InputError):
        Presentation((parse_relation("x - x"),))


@pytest.mark.slow
def test_original_and_groebner_relations_agree():
    groebner, original = a8_relations(), a8_relations(original=True)
    g = grading_of(groebner.weights)
    first = quotient_dimension(presentation_of(groebner), g, groebner.bound)
    second = quotient_dimension(presentation_of(original), g, original.bound)
    assert second.exact, second.reason
    assert second.dimension == 8
    assert same_normal_forms(first, second)


@pytest.mark.parametrize("relations, basis", [
    (("x", "y"), ("",)),
    (("x*y - y*x", "x^2", "y^2"), ("", "x", "y", "xy")),
])
def test_small_quotients(relations, basis):
    pres = Presentation(tuple(parse_relation(r) for r in relations))
    q = quotient_dimension(pres, WeightedGrading(), 6)
    assert q.exact, q.reason
    assert q.dimension == len(basis)
    assert q.basis == basis


def test_certificate_needs_room_for_products_of_standard_words():
    pres = Presentation(tuple(parse_relation(r) for r in ("x*y - y*x", "x^2", "y^2")))
    assert quotient_dimension(pres, WeightedGrading(), 4).exact
    q = quotient_dimension(pres, WeightedGrading(), 3)
    assert not q.exact
    assert "degree 4 > bound 3" in q.reason
    # only one-letter extensions of the identity word need reducing here
    points = Presentation((parse_relation("x"), parse_relation("y")))
    assert quotient_dimension(points, WeightedGrading(), 1).exact
