"""Problem files: parsing, compilation to a homomorphism, built-in scenarios."""
import json
import logging
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from pydantic import ValidationError

from flatdeform.core.ambient import AmbientAlgebra, BlockAlgebra, BlockSpec
from flatdeform.core.arithmetic import RationalFunction, UniPolynomial
from flatdeform.core.engine import HomomorphismSpec, apply
from flatdeform.core.finalg import FinAlgebra
from flatdeform.core.free_algebra import FreePolynomial, Presentation, WeightedGrading
from flatdeform.errors import ExpressionSyntaxError, InputError
from flatdeform.models.schemas import (
    BlockModel, MatrixBlockAlgebra, ProblemFile, ProblemOptions, RelationsFile, TableBlockAlgebra,
)
from flatdeform.utils.expression import format_element, parse_element, parse_relation

logger = logging.getLogger(__name__)


def _validation_detail(err: ValidationError) -> str:
    items = []
    for e in err.errors():
        where = ".".join(str(p) for p in e["loc"]) or "<root>"
        items.append(f"{where}: {e['msg']}")
    return "; ".join(items)


def _load_json(text: str, what: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{what} is not valid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e


def parse_problem(text: str) -> ProblemFile:
    """Validate a problem document and every expression inside it."""
    data = _load_json(text, "problem file")
    try:
        problem = ProblemFile.model_validate(data)
    except ValidationError as e:
        raise InputError(f"invalid problem file: {_validation_detail(e)}") from e
    compile_problem(problem)
    return problem


def load_problem(path) -> ProblemFile:
    path = Path(path)
    if not path.exists():
        raise InputError(f"problem file not found: {path}")
    return parse_problem(path.read_text(encoding="utf-8"))


def parse_relations(text: str) -> RelationsFile:
    data = _load_json(text, "relations file")
    try:
        rels = RelationsFile.model_validate(data)
    except ValidationError as e:
        raise InputError(f"invalid relations file: {_validation_detail(e)}") from e
    presentation_of(rels)
    return rels


def load_relations(path) -> RelationsFile:
    path = Path(path)
    if not path.exists():
        raise InputError(f"relations file not found: {path}")
    return parse_relations(path.read_text(encoding="utf-8"))


def presentation_of(rels: RelationsFile) -> Presentation:
    parsed = []
    for idx, text in enumerate(rels.relations):
        try:
            parsed.append(parse_relation(text, line=idx + 1))
        except ExpressionSyntaxError as e:
            raise InputError(f"relations[{idx}]: {e.detail}") from e
    return Presentation(tuple(parsed))


def grading_of(weights) -> WeightedGrading:
    if weights is None:
        return WeightedGrading()
    return WeightedGrading(int(weights[0]), int(weights[1]))


# ---------------------------------------------------------------------------
# compilation
# ---------------------------------------------------------------------------

def _expr(text: str, where: str) -> UniPolynomial:
    try:
        return parse_element(text)
    except ExpressionSyntaxError as e:
        raise InputError(f"{where}: {e.detail}") from e


def _block_algebra(model: BlockModel, where: str) -> BlockAlgebra:
    algebra = model.algebra
    if isinstance(algebra, MatrixBlockAlgebra):
        return BlockAlgebra.matrix(algebra.size)
    n = algebra.dim
    if len(algebra.constants) != n or any(len(row) != n or any(len(col) != n for col in row)
                                           for row in algebra.constants):
        raise InputError(f"{where}.constants must be {n} x {n} x {n}")
    if len(algebra.identity) != n:
        raise InputError(f"{where}.identity must have {n} entries")
    try:
        table = FinAlgebra.from_nested(algebra.constants, identity_index=None, identity=algebra.identity)
    except (ValueError, ZeroDivisionError) as e:
        raise InputError(f"{where}: structure constants must be rationals ({e})") from e
    return BlockAlgebra.from_table(table)


def _block_coordinates(value, spec: BlockSpec, where: str) -> list[UniPolynomial]:
    algebra = spec.algebra
    if algebra.kind == "matrix":
        size = algebra.size
        if len(value) != size or any(not isinstance(row, list) or len(row) != size for row in value):
            raise InputError(f"{where} must be a {size} x {size} matrix of expressions")
        return [_expr(entry, f"{where}[{r}][{c}]")
                for r, row in enumerate(value) for c, entry in enumerate(row)]
    if len(value) != algebra.dim_B or any(not isinstance(entry, str) for entry in value):
        raise InputError(f"{where} must list {algebra.dim_B} coordinate expressions")
    return [_expr(entry, f"{where}[{p}]") for p, entry in enumerate(value)]


def compile_problem(problem: ProblemFile) -> HomomorphismSpec:
    specs = []
    for idx, block in enumerate(problem.blocks):
        where = f"blocks[{idx}]"
        algebra = _block_algebra(block, f"{where}.algebra")
        min_poly = _expr(block.min_poly, f"{where}.min_poly")
        specs.append(BlockSpec(algebra, min_poly))
    if problem.method == 2 and any(spec.d != 1 for spec in specs):
        raise InputError("method 2 problems need minimal polynomials of degree 1 in every block")
    ambient = AmbientAlgebra(specs)
    images = []
    for name, values in (("f_x", problem.f_x), ("f_y", problem.f_y)):
        if len(values) != len(specs):
            raise InputError(f"{name} has {len(values)} blocks, expected {len(specs)}")
        images.append(ambient.element([
            _block_coordinates(value, spec, f"{name}[{idx}]")
            for idx, (value, spec) in enumerate(zip(values, specs))
        ]))
    return HomomorphismSpec(ambient, images[0], images[1])


def resolve_option(cli_value, problem_value, default):
    """CLI flag over problem-file option over environment/default."""
    if cli_value is not None:
        return cli_value
    if problem_value is not None:
        return problem_value
    return default


def dump_problem(problem: ProblemFile) -> str:
    return problem.model_dump_json(indent=2, exclude_none=True)


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class A8Params:
    i: int = 1
    j: int = 2
    k: int = 2
    s1: int = 3
    s2: int = 3

    @classmethod
    def parse(cls, text: str) -> "A8Params":
        try:
            values = [int(x) for x in text.split(",")]
        except ValueError as e:
            raise InputError(f"A8 parameters must be five integers i,j,k,s1,s2, got {text!r}") from e
        if len(values) != 5:
            raise InputError(f"A8 parameters must be five integers i,j,k,s1,s2, got {text!r}")
        return cls(*values)

    def violations(self) -> list[str]:
        i, j, k, s1, s2 = self.i, self.j, self.k, self.s1, self.s2
        out = []
        if min(i, j, k, s1, s2) < 1:
            out.append("all parameters must be positive")
        if s1 + s2 != 2 * i + j + k:
            out.append(f"s1+s2 = {s1 + s2} must equal 2i+j+k = {2 * i + j + k}")
        if j < i:
            out.append(f"j = {j} must be >= i = {i}")
        if 2 * j < k + i:
            out.append(f"2j = {2 * j} must be >= k+i = {k + i}")
        if not k + i > j:
            out.append(f"k+i = {k + i} must be > j = {j}")
        if not k > j - i:
            out.append(f"k = {k} must be > j-i = {j - i}")
        return out

    def check(self):
        problems = self.violations()
        if problems:
            raise InputError(f"invalid A8 parameters {self.as_text()}: " + "; ".join(problems))

    def as_text(self) -> str:
        return f"{self.i},{self.j},{self.k},{self.s1},{self.s2}"


def _t(k: int, c=1) -> RationalFunction:
    return RationalFunction.t_power(k) * Fraction(c)


def _u_poly(coeffs) -> UniPolynomial:
    return UniPolynomial([RationalFunction.zero() if c is None else c for c in coeffs], "u")


def a8_polynomials(p: A8Params) -> dict[str, UniPolynomial]:
    """g_1, h and the first-block images of x and y for the given parameters."""
    alpha = _t(p.k + p.i, Fraction(-1, 2))
    beta = _t(2 * (p.k + p.i - p.j), Fraction(1, 4))
    one = RationalFunction.one()
    g1 = _u_poly([beta, alpha ** 3, alpha ** 2, alpha, one])
    h = _u_poly([alpha ** 3, alpha ** 2, alpha, one]) * _t(2 * p.j - p.i - p.k, -2)
    return {
        "g1": g1,
        "h": h,
        "x1": h * _t(p.i),
        "y1": _u_poly([None, _t(p.j)]),
    }


def build_a8(params: A8Params | None = None) -> ProblemFile:
    """The A8 -> M2 + Q^4 deformation problem for the given parameters.

    Raises:
        InputError: the parameters violate the constraints, g_1 is not
            squarefree, or a build-time identity fails.
    """
    p = params or A8Params()
    p.check()
    polys = a8_polynomials(p)
    zero = "0"
    problem = ProblemFile(
        name=f"a8 ({p.as_text()})",
        method=3,
        blocks=[
            BlockModel(algebra=MatrixBlockAlgebra(kind="matrix", size=1), min_poly=format_element(polys["g1"])),
            BlockModel(algebra=MatrixBlockAlgebra(kind="matrix", size=2), min_poly="u - 1"),
        ],
        f_x=[[[format_element(polys["x1"])]], [[zero, f"t^{p.s1}"], [zero, zero]]],
        f_y=[[[format_element(polys["y1"])]], [[zero, zero], [f"t^{p.s2}", zero]]],
        options=ProblemOptions(expected_dim=8, degree_bound=40, weights=(1, 10)),
    )
    try:
        f = compile_problem(problem)
    except InputError as e:
        raise InputError(f"A8 parameters {p.as_text()} give an unusable problem ({e.detail}); "
                         "try another tuple satisfying the constraints") from e
    _check_a8_identities(f, p, polys)
    logger.info(f"Built A8 problem for parameters {p.as_text()}")
    return problem


def _check_a8_identities(f: HomomorphismSpec, p: A8Params, polys: dict):
    g1, h = polys["g1"], polys["h"]
    u = _u_poly([None, RationalFunction.one()])
    if (u * h) % g1 != _u_poly([_t(p.k + p.i, Fraction(1, 2))]):
        raise InputError(f"u*h(u) is not (1/2)t^{p.k + p.i} modulo g_1")
    x, y = FreePolynomial.word("x"), FreePolynomial.word("y")
    anticommutator = apply(f, x * y + y * x)
    if anticommutator != f.ambient.identity().scale(_t(p.s1 + p.s2)):
        raise InputError(f"f(xy+yx) differs from t^{p.s1 + p.s2} * 1")
    cubic = x ** 3 * y - x ** 2 * _t(p.k + 2 * p.i + p.j, Fraction(1, 2))
    if not apply(f, cubic).is_zero:
        raise InputError("f(x^3 y - (1/2) t^(k+2i+j) x^2) is not zero")


def a8_parameter_grid(bound: int = 4) -> list[A8Params]:
    """All valid tuples with i, j, k <= bound, s1 ranging over 1..s1+s2-1."""
    out = []
    for i in range(1, bound + 1):
        for j in range(1, bound + 1):
            for k in range(1, bound + 1):
                total = 2 * i + j + k
                for s1 in range(1, total):
                    params = A8Params(i, j, k, s1, total - s1)
                    if not params.violations():
                        out.append(params)
    return out


def build_m2_toy() -> ProblemFile:
    """f(x) = E11, f(y) = E12 + t E21 in 2 x 2 matrices."""
    return ProblemFile(
        name="toy-m2",
        method=2,
        blocks=[BlockModel(algebra=MatrixBlockAlgebra(kind="matrix", size=2), min_poly="u - 1")],
        f_x=[[["1", "0"], ["0", "0"]]],
        f_y=[[["0", "1"], ["t", "0"]]],
        options=ProblemOptions(expected_dim=4),
    )


def table_block(dim: int, constants, identity) -> BlockModel:
    """A block given by a structure-constant table, with g(u) = u - 1."""
    return BlockModel(
        algebra=TableBlockAlgebra(
            kind="table", dim=dim,
            constants=[[[str(Fraction(c)) for c in col] for col in row] for row in constants],
            identity=[str(Fraction(c)) for c in identity],
        ),
        min_poly="u - 1",
    )


A8_GROEBNER = ("x*y + y*x", "y^2 + x^3 + x^2", "x^3*y", "x^5")
# yx+yx in the printed list is read as xy+yx
A8_ORIGINAL = ("y^3*x", "y^4 + y^2*x - x^2 - y^2", "x^3 + x^2 + y^2", "y*x^2 + y^3", "x*y + y*x")


def a8_relations(original: bool = False) -> RelationsFile:
    return RelationsFile(relations=list(A8_ORIGINAL if original else A8_GROEBNER), weights=(1, 10), bound=40)
