"""Expression grammar, problem files and the built-in scenarios."""
import json
from fractions import Fraction

import pytest

from flatdeform.core.arithmetic import RationalFunction, UniPolynomial, is_squarefree
from flatdeform.errors import ExpressionSyntaxError, InputError
from flatdeform.utils.expression import (
    format_element, format_relation, parse_element, parse_laurent, parse_relation,
)
from flatdeform.utils.problem import (
    A8Params, a8_parameter_grid, a8_polynomials, build_a8, build_m2_toy, compile_problem, dump_problem,
    load_problem, parse_problem, parse_relations, resolve_option,
)


def test_element_parsing():
    p = parse_element("-1/2*t^3")
    assert p.degree == 0
    assert p[0] == RationalFunction.t_power(3) * Fraction(-1, 2)
    q = parse_element("u^2 - t*u + t^-1")
    assert q.var == "u"
    assert q[2] == 1 and q[1] == -RationalFunction.t_power(1)
    assert q[0] == RationalFunction.t_power(-1)
    assert parse_element("(t + 1)*(t - 1)")[0] == RationalFunction(UniPolynomial([-1, 0, 1]))


@pytest.mark.parametrize("text", ["-1/2*t^3", "u^4 - 1/2*t^3*u^3 + 1/4*t^2", "-3 + t^-2", "0"])
def test_element_printing_is_stable(text):
    assert format_element(parse_element(text)) == text


def test_syntax_errors_carry_the_column():
    with pytest.raises(ExpressionSyntaxError) as exc:
        parse_element("t^^2")
    assert exc.value.column == 3
    with pytest.raises(ExpressionSyntaxError) as exc:
        parse_element("t^^2", line=4)
    assert (exc.value.line, exc.value.column) == (4, 3)
    assert "line 4, column 3" in exc.value.detail
    with pytest.raises(ExpressionSyntaxError) as exc:
        parse_element("1/0")
    assert exc.value.column == 2
    with pytest.raises(ExpressionSyntaxError):
        parse_element("t +")
    with pytest.raises(ExpressionSyntaxError):
        parse_laurent("t*u")


def test_relation_parsing():
    r = parse_relation("x^3*y - 1/2*x x + 2")
    assert r.rational_terms() == {"xxxy": 1, "xx": Fraction(-1, 2), "": 2}
    assert format_relation(parse_relation("y x + x y")) == "x*y + y*x"
    with pytest.raises(ExpressionSyntaxError):
        parse_relation("x*z")
    with pytest.raises(ExpressionSyntaxError):
        parse_relation("2*")


def test_fixture_files_match_the_builders(fixtures_dir):
    toy = load_problem(fixtures_dir / "toy_m2.json")
    assert toy == build_m2_toy()
    a8 = load_problem(fixtures_dir / "a8.json")
    assert compile_problem(a8).ambient == compile_problem(build_a8()).ambient
    assert compile_problem(a8).image_x == compile_problem(build_a8()).image_x


def test_dumped_problem_parses_back():
    problem = build_a8()
    assert parse_problem(dump_problem(problem)) == problem


def test_invalid_problem_files_are_input_errors():
    with pytest.raises(InputError, match="not valid JSON"):
        parse_problem("{")
    with pytest.raises(InputError, match="blocks"):
        parse_problem(json.dumps({"f_x": [], "f_y": []}))
    toy = json.loads(dump_problem(build_m2_toy()))
    toy["f_y"] = [[["0", "1"], ["t^^2", "0"]]]
    with pytest.raises(InputError, match=r"f_y\[0\]\[1\]\[0\]"):
        parse_problem(json.dumps(toy))
    toy["f_y"] = [[["0", "1"]]]
    with pytest.raises(InputError, match="2 x 2"):
        parse_problem(json.dumps(toy))


def test_method_two_needs_linear_minimal_polynomials():
    problem = build_a8().model_copy(update={"method": 2})
    with pytest.raises(InputError, match="method 2"):
        compile_problem(problem)


def test_missing_file_is_an_input_error(tmp_path):
    with pytest.raises(InputError):
        load_problem(tmp_path / "missing.json")


def test_relations_file():
    rels = parse_relations(json.dumps({"relations": ["x*y + y*x"], "weights": [1, 10], "bound": 40}))
    assert rels.weights == (1, 10)
    with pytest.raises(InputError, match=r"relations\[1\]"):
        parse_relations(json.dumps({"relations": ["x", "x*"]}))


def test_resolve_option_precedence():
    assert resolve_option(5, 7, 9) == 5
    assert resolve_option(None, 7, 9) == 7
    assert resolve_option(None, None, 9) == 9


def test_a8_parameters():
    assert A8Params.parse("1,1,1,2,2").violations() == []
    assert A8Params().violations() == []
    assert A8Params.parse("1,1,2,2,3").violations()
    with pytest.raises(InputError):
        build_a8(A8Params(1, 1, 2, 2, 3))
    with pytest.raises(InputError):
        A8Params.parse("1,2,3")


def test_a8_parameter_grid():
    grid = a8_parameter_grid(2)
    assert A8Params(1, 1, 1, 2, 2) in grid
    assert A8Params(1, 2, 2, 3, 3) in grid
    assert all(not p.violations() for p in grid)


def test_a8_minimal_polynomial_for_default_parameters():
    g1 = a8_polynomials(A8Params())["g1"]
    assert format_element(g1) == "u^4 - 1/2*t^3*u^3 + 1/4*t^6*u^2 - 1/8*t^9*u + 1/4*t^2"


@pytest.mark.parametrize("params", ["1,1,1,2,2", "1,2,2,3,3", "2,2,1,4,3"])
def test_a8_builds_for_valid_parameters(params):
    problem = build_a8(A8Params.parse(params))
    assert problem.options.expected_dim == 8
    assert compile_problem(problem).n == 8


def test_every_grid_tuple_builds_an_engine_ready_problem():
    grid = a8_parameter_grid(2)
    assert grid
    for params in grid:
        f = compile_problem(build_a8(params))
        assert f.n == 8
        assert all(is_squarefree(spec.min_poly) for spec in f.ambient.blocks)
        assert f.word_vector("") == f.ambient.identity().flatten()
