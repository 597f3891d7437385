"""Command-line entry point: ``python -m flatdeform.main <command> ...``."""
import argparse
import logging
import sys
from fractions import Fraction

from flatdeform.config import Settings, get_settings
from flatdeform.core.arithmetic import as_rational
from flatdeform.core.engine import (
    check_associativity_formal, recheck_closure, special_fiber, structure_residuals,
)
from flatdeform.core.finalg import check_associative, structure_report
from flatdeform.core.report import DeformationRun, structure_model
from flatdeform.errors import DeformationError, InputError, VerificationFailed
from flatdeform.models.schemas import RunReport
from flatdeform.utils.export import (
    fiber_csv, is_table_document, parse_table, polytype_to_model, table_to_model, write_model, write_text,
)
from flatdeform.utils.problem import (
    A8Params, a8_relations, build_a8, build_m2_toy, dump_problem, grading_of, load_problem,
    load_relations, parse_problem, presentation_of, resolve_option,
)

logger = logging.getLogger("flatdeform")


def _rational(text: str) -> Fraction:
    try:
        return as_rational(text)
    except InputError as e:
        raise argparse.ArgumentTypeError(e.detail)


def _weights(text: str) -> tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"weights must look like 'a,b', got {text!r}")
    if a < 1 or b < 1:
        raise argparse.ArgumentTypeError("weights must be positive")
    return a, b


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="write the machine-readable result to this path")
    common.add_argument("--word-budget", type=int, help="words scanned before basis extraction gives up")
    common.add_argument("--quiet", action="store_true", help="only log warnings and errors")

    parser = argparse.ArgumentParser(
        prog="flatdeform",
        description="Flat deformations of finite-dimensional algebras by exact computation",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="image basis and deformation table")
    p.add_argument("problem")
    p.add_argument("--table", help="also export the deformation table to this path")

    p = sub.add_parser("fiber", parents=[common], help="special fiber at t = 0")
    p.add_argument("problem")
    p.add_argument("--csv", help="write the zeta table as CSV")

    p = sub.add_parser("verify", parents=[common], help="re-verify a problem or a table file")
    p.add_argument("file")

    p = sub.add_parser("specialize", parents=[common], help="structure of the fiber at t = s")
    p.add_argument("problem")
    p.add_argument("--at", type=_rational, required=True)

    p = sub.add_parser("present", parents=[common], help="check a presentation of the special fiber")
    p.add_argument("problem")
    p.add_argument("--relations", required=True)
    p.add_argument("--weights", type=_weights)
    p.add_argument("--bound", type=int)

    p = sub.add_parser("polytype", parents=[common], help="polynomial-type form of the table")
    p.add_argument("problem")

    p = sub.add_parser("flatcert", parents=[common], help="certify flatness on an interval")
    p.add_argument("problem")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("a8", parents=[common], help="the A8 scenario end to end")
    p.add_argument("--params", default="1,2,2,3,3", help="i,j,k,s1,s2")
    p.add_argument("--emit", help="write the built problem file and stop")
    p.add_argument("--depth", type=int)

    p = sub.add_parser("toy-m2", parents=[common], help="the 2 x 2 matrix toy scenario end to end")
    p.add_argument("--emit", help="write the built problem file and stop")
    p.add_argument("--depth", type=int)
    return parser


def _word_budget(args, problem, settings: Settings) -> int:
    return resolve_option(args.word_budget, problem.options.word_budget, settings.word_budget)


def _depth(args, problem, settings: Settings) -> int:
    return resolve_option(args.depth, problem.options.s_search_depth, settings.search_depth)


def _finish(args, report: RunReport):
    if args.out:
        write_model(args.out, report)


def cmd_analyze(args, settings: Settings) -> int:
    problem = load_problem(args.problem)
    run = DeformationRun(problem, _word_budget(args, problem, settings), "analyze")
    table = run.analyze()
    print(f"rank {run.basis.n}; q = {', '.join(b.q for b in run.report.basis)}; orders {run.basis.orders}")
    print(f"table digest {table.digest()}")
    if args.table:
        write_model(args.table, table_to_model(table))
    _finish(args, run.report)
    return 0


def cmd_fiber(args, settings: Settings) -> int:
    problem = load_problem(args.problem)
    run = DeformationRun(problem, _word_budget(args, problem, settings), "fiber")
    report = run.fiber()
    print(report.summary())
    if args.csv:
        write_text(args.csv, fiber_csv(run.table))
    _finish(args, run.report)
    return 0


def _verify_table_file(args, text: str) -> int:
    table = parse_table(text)
    table.validate()
    result = check_associativity_formal(table)
    if not result:
        raise VerificationFailed(f"table is not associative at basis triple {result.witness}",
                                 witness=result.witness)
    witness = table.identity_witness()
    if witness is not None:
        raise VerificationFailed(f"identity law fails at {witness}", witness=witness)
    report = RunReport(command="verify", n=table.n, table_digest=table.digest(), associative=True)
    report.fiber = structure_model(structure_report(special_fiber(table)))
    print(f"✓ table of dimension {table.n} is associative with a two-sided identity")
    _finish(args, report)
    return 0


def cmd_verify(args, settings: Settings) -> int:
    try:
        with open(args.file, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as e:
        raise InputError(f"cannot read {args.file}: {e}") from e
    if is_table_document(text):
        return _verify_table_file(args, text)
    problem = parse_problem(text)
    run = DeformationRun(problem, _word_budget(args, problem, settings), "verify")
    table = run.analyze()
    bad = structure_residuals(run.f, run.basis, table)
    if bad:
        raise VerificationFailed(f"structure constants do not reproduce {len(bad)} products", witness=bad)
    missing = recheck_closure(run.f, run.basis, 2 * max(run.basis.max_length, 1))
    if missing:
        raise VerificationFailed(f"{len(missing)} words escape the image basis", witness=missing)
    fiber = special_fiber(table)
    if not check_associative(fiber) or not fiber.check_identity():
        raise VerificationFailed("special fiber is not a unital associative algebra")
    witness = table.identity_witness()
    if witness is not None:
        raise VerificationFailed(f"identity law fails at {witness}", witness=witness)
    run.fiber()
    print(f"✓ verified: rank {run.basis.n}, residuals 0, closure rechecked")
    _finish(args, run.report)
    return 0


def cmd_specialize(args, settings: Settings) -> int:
    problem = load_problem(args.problem)
    run = DeformationRun(problem, _word_budget(args, problem, settings), "specialize")
    report = run.specialize(args.at)
    print(f"t = {args.at}: {report.summary()}")
    _finish(args, run.report)
    return 0


def cmd_present(args, settings: Settings) -> int:
    problem = load_problem(args.problem)
    rels = load_relations(args.relations)
    weights = resolve_option(args.weights, rels.weights, problem.options.weights)
    bound = resolve_option(args.bound, rels.bound,
                           resolve_option(None, problem.options.degree_bound, settings.degree_bound))
    run = DeformationRun(problem, _word_budget(args, problem, settings), "present")
    verdict = run.present(presentation_of(rels), grading_of(weights), bound)
    print(f"{verdict.verdict}: quotient dimension {verdict.quotient.dimension} "
          f"({'exact' if verdict.quotient.exact else 'lower bound'}), fiber dimension {run.basis.n}")
    _finish(args, run.report)
    return 0


def cmd_polytype(args, settings: Settings) -> int:
    problem = load_problem(args.problem)
    run = DeformationRun(problem, _word_budget(args, problem, settings), "polytype")
    pt = run.polytype()
    print(f"h(t) of degree {pt.h.degree}: {pt.h}")
    if args.out:
        write_model(args.out, polytype_to_model(pt))
    return 0


def cmd_flatcert(args, settings: Settings) -> int:
    problem = load_problem(args.problem)
    run = DeformationRun(problem, _word_budget(args, problem, settings), "flatcert")
    cert = run.flatcert(_depth(args, problem, settings))
    print(cert.summary())
    _finish(args, run.report)
    return 0


def _scenario(args, settings: Settings, problem, name: str, relations=None) -> int:
    if args.emit:
        write_text(args.emit, dump_problem(problem) + "\n")
        return 0
    run = DeformationRun(problem, _word_budget(args, problem, settings), name)
    run.analyze()
    fiber = run.fiber()
    print(f"rank {run.basis.n}; q = {', '.join(b.q for b in run.report.basis)}; orders {run.basis.orders}")
    print(f"fiber: {fiber.summary()}")
    if relations is not None:
        verdict = run.present(presentation_of(relations), grading_of(relations.weights), relations.bound)
        print(f"presentation: {verdict.verdict} (quotient dimension {verdict.quotient.dimension})")
    cert = run.flatcert(_depth(args, problem, settings))
    print(f"flatness: {cert.summary()}")
    _finish(args, run.report)
    return 0


def cmd_a8(args, settings: Settings) -> int:
    problem = build_a8(A8Params.parse(args.params))
    return _scenario(args, settings, problem, "a8", a8_relations())


def cmd_toy(args, settings: Settings) -> int:
    return _scenario(args, settings, build_m2_toy(), "toy-m2")


COMMANDS = {
    "analyze": cmd_analyze,
    "fiber": cmd_fiber,
    "verify": cmd_verify,
    "specialize": cmd_specialize,
    "present": cmd_present,
    "polytype": cmd_polytype,
    "flatcert": cmd_flatcert,
    "a8": cmd_a8,
    "toy-m2": cmd_toy,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        settings = get_settings()
    except ValueError as e:
        print(f"invalid FLATDEFORM_* setting: {e}", file=sys.stderr)
        return 2
    logging.basicConfig(level="WARNING" if args.quiet else settings.log_level,
                        format="%(levelname)s:%(name)s:%(message)s")
    try:
        return COMMANDS[args.command](args, settings)
    except DeformationError as e:
        logger.error(f"{type(e).__name__}: {e.detail}")
        return e.exit_code
    except Exception as e:
        logger.error(f"Unexpected error: {str(e)}", exc_info=True)
        return 2


if __name__ == "__main__":
    sys.exit(main())
