"""Pipeline runner: problem file in, RunReport out."""
import logging
from fractions import Fraction

from flatdeform.core.certificate import FlatnessCertificate, flatness_certificate
from flatdeform.core.engine import (
    DeformationTable, ImageBasis, PolyTypeTable, PresentationVerdict, check_associativity_formal,
    compute_image_basis, fiber_generators, generation_dimension_at, special_fiber, specialize_family,
    structure_constants, to_polynomial_type, verify_presentation,
)
from flatdeform.core.finalg import StructureReport, check_associative, structure_report
from flatdeform.core.free_algebra import Presentation, WeightedGrading, format_word
from flatdeform.errors import PoleError, VerificationFailed
from flatdeform.models.schemas import (
    BasisEntryReport, CertificateReport, PresentationReport, ProblemFile, RunReport, StructureReportModel,
)
from flatdeform.utils.problem import compile_problem

logger = logging.getLogger(__name__)


def structure_model(report: StructureReport) -> StructureReportModel:
    return StructureReportModel(
        dim=report.dim,
        radical_dim=report.radical_dim,
        center_dim=report.center_dim,
        semisimple=report.semisimple,
        shape=list(report.shape) if report.shape is not None else None,
        shape_candidates=[list(s) for s in report.shape_candidates],
    )


def basis_models(basis: ImageBasis) -> list[BasisEntryReport]:
    return [
        BasisEntryReport(word=e.word, q=format_word(e.word), order=e.order, pivot=e.pivot,
                         direction=[str(x) for x in e.direction])
        for e in basis.entries
    ]


def presentation_model(verdict: PresentationVerdict) -> PresentationReport:
    return PresentationReport(
        verdict=verdict.verdict,
        dimension=verdict.quotient.dimension,
        exact=verdict.quotient.exact,
        basis=[format_word(w) for w in verdict.quotient.basis],
        memberships=verdict.memberships,
        reason=verdict.reason,
    )


def certificate_model(cert: FlatnessCertificate) -> CertificateReport:
    return CertificateReport(
        s_max=str(cert.s_max),
        denominator_master=[str(c) for c in cert.denominator_master.coeffs],
        semisimple_master_degree=cert.semisimple_master.degree,
        root_counts=cert.root_counts,
        pole_order=cert.pole_order,
        generation_dimension=cert.generation_dimension,
        squarefree_blocks=list(cert.squarefree_blocks),
        reports={str(s): structure_model(r) for s, r in cert.reports.items()},
    )


class DeformationRun:
    """One problem pushed through the pipeline; later stages reuse earlier ones."""

    def __init__(self, problem: ProblemFile, word_budget: int = 400, command: str = "analyze"):
        self.problem = problem
        self.word_budget = word_budget
        self.report = RunReport(command=command, problem=problem.name)
        self.f = None
        self.basis: ImageBasis | None = None
        self.table: DeformationTable | None = None

    def analyze(self) -> DeformationTable:
        if self.table is not None:
            return self.table
        logger.info("Step 1: Building homomorphism...")
        self.f = compile_problem(self.problem)
        self.report.pole_bound = self.f.pole_bound
        logger.info(f"Ambient algebra of dimension {self.f.n}, pole bound {self.report.pole_bound}")

        logger.info("Step 2: Extracting image basis...")
        self.basis = compute_image_basis(self.f, self.problem.options.expected_dim, self.word_budget)

        logger.info("Step 3: Computing structure constants...")
        self.table = structure_constants(self.f, self.basis)

        logger.info("Step 4: Checking associativity over Q(t)...")
        result = check_associativity_formal(self.table)
        if not result:
            raise VerificationFailed(f"deformation table is not associative at basis triple {result.witness}",
                                     witness=result.witness)

        self.report.n = self.basis.n
        self.report.basis = basis_models(self.basis)
        self.report.words_scanned = self.basis.words_scanned
        self.report.table_digest = self.table.digest()
        self.report.associative = True
        logger.info(f"✓ Deformation table ready: n = {self.basis.n}, q = {[format_word(w) for w in self.basis.words]}")
        return self.table

    def fiber(self) -> StructureReport:
        table = self.analyze()
        logger.info("Step 5: Analyzing the special fiber...")
        fiber = special_fiber(table)
        if not check_associative(fiber):
            raise VerificationFailed("special fiber is not associative", witness=fiber.associativity_witness())
        report = structure_report(fiber)
        self.report.fiber = structure_model(report)
        logger.info(f"Special fiber: {report.summary()}")
        return report

    def fiber_generators(self):
        self.analyze()
        return fiber_generators(self.f, self.basis)

    def polytype(self) -> PolyTypeTable:
        table = self.analyze()
        logger.info("Step 5: Converting to polynomial type...")
        pt = to_polynomial_type(table)
        self.report.polytype_h = [str(c) for c in pt.h.coeffs]
        return pt

    def specialize(self, s: Fraction) -> StructureReport:
        table = self.analyze()
        logger.info(f"Step 5: Specializing the family at t = {s}...")
        try:
            algebra = specialize_family(table, s)
        except PoleError:
            logger.error(f"The family has a pole at t = {s}")
            raise
        if not check_associative(algebra):
            raise VerificationFailed(f"specialized algebra at t = {s} is not associative",
                                     witness=algebra.associativity_witness())
        report = structure_report(algebra)
        self.report.specialization = {str(s): structure_model(report)}
        if s != 0:
            self.report.generation_dimension = generation_dimension_at(self.f, s)
        logger.info(f"Fiber at t = {s}: {report.summary()}")
        return report

    def present(self, rels: Presentation, grading: WeightedGrading, bound: int) -> PresentationVerdict:
        self.analyze()
        logger.info(f"Step 5: Verifying a presentation with {len(rels.relations)} relations, bound {bound}...")
        verdict = verify_presentation(self.f, self.basis, rels, grading, bound)
        self.report.presentation = presentation_model(verdict)
        return verdict

    def flatcert(self, depth: int) -> FlatnessCertificate:
        table = self.analyze()
        logger.info(f"Step 5: Certifying flatness (search depth {depth})...")
        cert = flatness_certificate(table, self.f, depth)
        self.report.certificate = certificate_model(cert)
        return cert
