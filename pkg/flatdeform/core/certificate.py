"""Flatness certificate for a deformation table.

Two master polynomials in t control the family: the denominator master
vanishes where some structure constant has a pole, the semisimple master
vanishes where the trace form degenerates or some g_i(u) acquires a repeated
root. A halving search looks for the largest s = 2^-m such that neither
master has a root in (0, s]; Sturm chains make that an exact statement.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from flatdeform.core.ambient import squarefree_at
from flatdeform.core.arithmetic import (
    UniPolynomial, as_rational, chain_root_count, discriminant, poly_lcm, rf, sturm_sequence,
)
from flatdeform.core.engine import (
    DeformationTable, HomomorphismSpec, generation_dimension_at, specialize_family, to_polynomial_type,
)
from flatdeform.core.finalg import StructureReport, check_associative, structure_report
from flatdeform.core.linalg import bareiss_determinant
from flatdeform.errors import BudgetExhausted, VerificationFailed

logger = logging.getLogger(__name__)


@dataclass
class FlatnessCertificate:
    s_max: Fraction
    denominator_master: UniPolynomial
    semisimple_master: UniPolynomial
    root_counts: dict[str, int]
    pole_order: int = 0
    generation_dimension: int = 0
    squarefree_blocks: tuple[bool, ...] = ()
    reports: dict[Fraction, StructureReport] = field(default_factory=dict)
    tried: list[Fraction] = field(default_factory=list)

    @property
    def report(self) -> StructureReport:
        return self.reports[self.s_max]

    def summary(self) -> str:
        return (f"s_max = {self.s_max}; denominator master degree {self.denominator_master.degree}, "
                f"semisimple master degree {self.semisimple_master.degree}; "
                f"generation dimension {self.generation_dimension}; {self.report.summary()}")


def strip_t(p: UniPolynomial) -> tuple[UniPolynomial, int]:
    """(p / t^v, v) where v is the t-adic valuation of p."""
    if p.is_zero:
        return p, 0
    v = int(p.valuation())
    return p.shift(-v), v


def denominator_master(table: DeformationTable, f: HomomorphismSpec | None = None) -> tuple[UniPolynomial, int]:
    """lcm of all denominators of the table and of the generator images.

    Powers of t are split off: they are returned as the pole order of the
    images, since the table itself is pole-free at 0.
    """
    master = to_polynomial_type(table).h.monic()
    pole_order = 0
    if f is not None:
        for coord in f.word_vector("x") + f.word_vector("y"):
            den, order = strip_t(coord.den)
            pole_order = max(pole_order, order)
            if den.degree > 0:
                master = poly_lcm(master, den)
    return master, pole_order


def trace_form_determinant(table: DeformationTable) -> UniPolynomial:
    """det of the trace form of the sigma table, a polynomial multiple of det T(t)."""
    sigma = to_polynomial_type(table).sigma
    n = table.n
    zero = UniPolynomial.zero("t")
    tau = [sum((sigma[l, k, l] for l in range(n)), zero) for k in range(n)]
    form = [[sum((sigma[k, i, j] * tau[k] for k in range(n)
                  if not tau[k].is_zero and not sigma[k, i, j].is_zero), zero)
             for j in range(n)] for i in range(n)]
    return bareiss_determinant(form)


def semisimple_master(table: DeformationTable, f: HomomorphismSpec | None = None) -> UniPolynomial:
    det = trace_form_determinant(table)
    if det.is_zero:
        raise VerificationFailed("trace form of the family is degenerate over Q(t); no fiber is semisimple")
    master, _ = strip_t(det)
    if f is not None:
        for spec in f.ambient.blocks:
            if spec.d < 2:
                continue
            disc, _ = strip_t(rf(discriminant(spec.min_poly)).num)
            master = master * disc
    return master.monic()


def flatness_certificate(table: DeformationTable, f: HomomorphismSpec, depth: int = 20) -> FlatnessCertificate:
    """Search s = 1, 1/2, ..., 2^-depth for a certified interval (0, s].

    A candidate s is accepted when both masters are root-free on (0, s],
    every g_i stays squarefree at s and f(x)(s), f(y)(s) generate an algebra
    of dimension n.

    Raises:
        BudgetExhausted: no candidate passed.
        VerificationFailed: the trace form vanishes identically, or the
            structure reports at s, s/2 and s/4 disagree.
    """
    table.validate()
    den_master, pole_order = denominator_master(table, f)
    ss_master = semisimple_master(table, f)
    chains = {"denominator": sturm_sequence(den_master), "semisimple": sturm_sequence(ss_master)}
    masters = {"denominator": den_master, "semisimple": ss_master}
    logger.info(f"Masters: denominator degree {den_master.degree}, semisimple degree {ss_master.degree}")

    tried: list[Fraction] = []
    history = []
    s = Fraction(1)
    for _ in range(depth + 1):
        tried.append(s)
        counts = {}
        clear = True
        for name, p in masters.items():
            if p.evaluate(s) == 0:
                counts[name] = -1
                clear = False
                continue
            counts[name] = chain_root_count(chains[name], 0, s)
            clear = clear and counts[name] == 0
        history.append({"s": str(s), **counts})
        if clear:
            squarefree = tuple(squarefree_at(spec, s) for spec in f.ambient.blocks)
            if all(squarefree):
                generated = generation_dimension_at(f, s)
                if generated == table.n:
                    return _finish(table, s, den_master, ss_master, counts, pole_order,
                                   generated, squarefree, tried)
                logger.debug(f"s = {s}: generated dimension {generated} != {table.n}")
            else:
                logger.debug(f"s = {s}: some g_i is not squarefree")
        else:
            logger.debug(f"s = {s}: master roots {counts}")
        s = s / 2
    raise BudgetExhausted(
        f"no certified interval found down to s = {tried[-1]}",
        diagnostics={"history": history,
                     "denominator_master": str(den_master),
                     "semisimple_master": str(ss_master)})


def _finish(table, s, den_master, ss_master, counts, pole_order, generated, squarefree, tried):
    reports: dict[Fraction, StructureReport] = {}
    for point in (s, s / 2, s / 4):
        algebra = specialize_family(table, point)
        if not check_associative(algebra):
            raise VerificationFailed(f"specialized algebra at s = {point} is not associative",
                                     witness=algebra.associativity_witness())
        reports[point] = structure_report(algebra)
    distinct = {(r.dim, r.radical_dim, r.center_dim, r.semisimple, r.shape_candidates)
                for r in reports.values()}
    if len(distinct) != 1:
        raise VerificationFailed(
            "structure reports differ across the certified interval",
            witness={str(k): v.summary() for k, v in reports.items()})
    cert = FlatnessCertificate(
        s_max=as_rational(s),
        denominator_master=den_master,
        semisimple_master=ss_master,
        root_counts=dict(counts),
        pole_order=pole_order,
        generation_dimension=generated,
        squarefree_blocks=squarefree,
        reports=reports,
        tried=tried,
    )
    logger.info(f"✓ Flatness certified on (0, {s}]: {cert.report.summary()}")
    return cert
