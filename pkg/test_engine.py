"""Deformation engine on the 2 x 2 matrix toy, where everything is known by hand.

f(x) = E11, f(y) = E12 + t E21; the image basis is 1, x, y, yx.
"""
import random
from fractions import Fraction

import pytest

from flatdeform.core.engine import (
    apply, check_associativity_formal, compute_image_basis, fiber_generators, generation_dimension_at,
    recheck_closure, relation_in_Jprime, special_fiber, specialize_family, structure_constants,
    structure_residuals, to_polynomial_type, verify_presentation,
)
from flatdeform.core.arithmetic import RationalFunction
from flatdeform.core.finalg import structure_report
from flatdeform.core.free_algebra import FreePolynomial, Presentation, WeightedGrading
from flatdeform.errors import BudgetExhausted, InputError, VerificationFailed
from flatdeform.models.schemas import BlockModel, MatrixBlockAlgebra, ProblemFile
from flatdeform.utils.expression import parse_relation
from flatdeform.utils.export import table_from_model, table_to_model
from flatdeform.utils.problem import build_a8, build_m2_toy, compile_problem, table_block

T = RationalFunction.t_power(1)
ONE, X, Y, YX = range(4)


def test_toy_image_basis(toy_run):
    basis = toy_run.basis
    assert basis.words == ["", "x", "y", "yx"]
    assert basis.orders == [0, 0, 0, 1]
    assert [e.direction for e in basis.entries] == [(1, 0, 0, 1), (1, 0, 0, 0), (0, 1, 0, 0), (0, 0, 1, 0)]
    assert [e.pivot for e in basis.entries] == [3, 0, 1, 2]
    assert basis.max_length == 2


def test_toy_structure_constants(toy_run):
    c = toy_run.table.c
    assert [c[i, Y, Y] for i in range(4)] == [T, 0, 0, 0]
    # x*y = E12 = f(y) - f(yx)
    assert [c[i, X, Y] for i in range(4)] == [0, 0, 1, -1]
    assert [c[i, Y, X] for i in range(4)] == [0, 0, 0, 1]
    # yx*y = t E22 = t(1 - x)
    assert [c[i, YX, Y] for i in range(4)] == [T, -T, 0, 0]
    assert toy_run.table.identity_witness() is None


def test_toy_special_fiber(toy_run):
    zeta = toy_run.table.zeta()
    assert zeta[X, X, X] == 1
    assert [zeta[i, X, Y] for i in range(4)] == [0, 0, 1, -1]
    assert all(zeta[i, Y, Y] == 0 for i in range(4))
    assert all(zeta[i, YX, Y] == 0 for i in range(4))
    report = structure_report(special_fiber(toy_run.table))
    assert (report.dim, report.radical_dim, report.center_dim) == (4, 2, 1)
    assert not report.semisimple


def test_toy_table_checks(toy_run):
    assert check_associativity_formal(toy_run.table)
    assert structure_residuals(toy_run.f, toy_run.basis, toy_run.table) == []
    assert recheck_closure(toy_run.f, toy_run.basis, 4) == []
    assert fiber_generators(toy_run.f, toy_run.basis) == [[0, 1, 0, 0], [0, 0, 1, 0]]


def test_toy_polynomial_type(toy_run):
    pt = to_polynomial_type(toy_run.table)
    assert pt.h == 1
    assert pt.sigma[ONE, Y, Y] == T.num


def test_toy_specializations(toy_run):
    at_one = structure_report(specialize_family(toy_run.table, 1))
    assert at_one.semisimple and at_one.shape == (2,)
    at_zero = specialize_family(toy_run.table, 0)
    assert (at_zero.constants == special_fiber(toy_run.table).constants).all()
    assert generation_dimension_at(toy_run.f, 1) == 4
    assert generation_dimension_at(toy_run.f, 0) == 3


def test_toy_flatness_certificate(toy_run):
    cert = toy_run.flatcert(20)
    assert cert.s_max == 1
    assert cert.denominator_master == 1
    assert cert.root_counts == {"denominator": 0, "semisimple": 0}
    assert cert.generation_dimension == 4
    assert set(cert.reports) == {Fraction(1), Fraction(1, 2), Fraction(1, 4)}
    assert all(r.shape == (2,) for r in cert.reports.values())


def test_toy_relation_membership(toy_run):
    f, basis = toy_run.f, toy_run.basis
    assert relation_in_Jprime(f, basis, parse_relation("x^2 - x"))
    assert relation_in_Jprime(f, basis, parse_relation("y^2"))
    assert relation_in_Jprime(f, basis, parse_relation("x*y + y*x - y"))
    assert not relation_in_Jprime(f, basis, parse_relation("x - y"))


def test_toy_presentation(toy_run):
    rels = Presentation(tuple(parse_relation(r) for r in ("x^2 - x", "y^2", "x*y + y*x - y")))
    verdict = verify_presentation(toy_run.f, toy_run.basis, rels, WeightedGrading(), 10)
    assert verdict.verdict == "isomorphic"
    assert verdict.quotient.dimension == 4
    with pytest.raises(VerificationFailed):
        verify_presentation(toy_run.f, toy_run.basis, Presentation((parse_relation("x - y"),)),
                            WeightedGrading(), 10)


def test_table_file_preserves_digest(toy_run):
    table = table_from_model(table_to_model(toy_run.table))
    assert table == toy_run.table
    assert table.digest() == toy_run.table.digest()


def test_word_budget_is_enforced():
    f = compile_problem(build_m2_toy())
    with pytest.raises(BudgetExhausted) as exc:
        compute_image_basis(f, None, word_budget=2)
    assert exc.value.exit_code == 3
    assert exc.value.diagnostics["rank"] == 1


def test_rank_above_expected_dimension_is_an_input_error():
    f = compile_problem(build_m2_toy())
    with pytest.raises(InputError):
        compute_image_basis(f, expected_n=3)


def test_homomorphism_law_on_random_polynomials():
    f = compile_problem(build_a8())
    rng = random.Random(8)

    def random_poly():
        terms = {}
        for _ in range(rng.randint(1, 3)):
            w = "".join(rng.choice("xy") for _ in range(rng.randint(0, 3)))
            terms[w] = Fraction(rng.randint(-3, 3), rng.randint(1, 2))
        return FreePolynomial(terms)

    for _ in range(100):
        p, q = random_poly(), random_poly()
        assert apply(f, p * q) == apply(f, p) * apply(f, q)
        assert apply(f, p + q) == apply(f, p) + apply(f, q)


def pole_problem() -> ProblemFile:
    """f(x) = t^-1 E12, f(y) = t E21; f(x) has lower order than f(1)."""
    return ProblemFile(
        name="pole-m2",
        blocks=[BlockModel(algebra=MatrixBlockAlgebra(kind="matrix", size=2), min_poly="u - 1")],
        f_x=[[["0", "t^-1"], ["0", "0"]]],
        f_y=[[["0", "0"], ["t", "0"]]],
    )


def test_identity_word_comes_first_when_an_image_has_a_pole():
    f = compile_problem(pole_problem())
    assert f.pole_bound == 1
    basis = compute_image_basis(f, None)
    assert basis.words == ["", "x", "xy", "y"]
    assert basis.orders == [0, -1, 0, 1]
    table = structure_constants(f, basis)
    assert table.identity_witness() is None
    assert check_associativity_formal(table)
    # xy * x = E11 * t^-1 E12 = f(x)
    assert [table.c[i, 2, 1] for i in range(4)] == [0, 1, 0, 0]


def test_pole_bound_is_reported(toy_run):
    assert toy_run.report.pole_bound == 0
    assert toy_run.f.pole_bound == 0


def test_table_block_through_the_engine():
    # Q x Q with orthogonal idempotents e1, e2
    product = [[[int(i == k == m) for m in range(2)] for k in range(2)] for i in range(2)]
    problem = ProblemFile(
        name="q2",
        blocks=[table_block(2, product, [1, 1])],
        f_x=[["1", "0"]],
        f_y=[["0", "t"]],
    )
    f = compile_problem(problem)
    basis = compute_image_basis(f, 2)
    assert basis.words == ["", "x"]
    table = structure_constants(f, basis)
    assert [table.c[i, 1, 1] for i in range(2)] == [0, 1]
    assert check_associativity_formal(table)
    report = structure_report(special_fiber(table))
    assert report.semisimple and report.shape == (1, 1)
