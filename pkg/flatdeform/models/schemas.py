from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, Field


# problem files

class MatrixBlockAlgebra(BaseModel):
    kind: Literal["matrix"]
    size: int = Field(..., ge=1, description="Matrix size; the block algebra is M_size(Q)")


class TableBlockAlgebra(BaseModel):
    kind: Literal["table"]
    dim: int = Field(..., ge=1)
    constants: List[List[List[str]]] = Field(..., description="constants[i][k][m]: coefficient of b_i in b_k * b_m")
    identity: List[str] = Field(..., description="Coordinates of the identity element")


BlockAlgebraModel = Annotated[Union[MatrixBlockAlgebra, TableBlockAlgebra], Field(discriminator="kind")]


class BlockModel(BaseModel):
    algebra: BlockAlgebraModel
    min_poly: str = Field("u - 1", description="Monic g(u) with coefficients in Q[t]")


class ProblemOptions(BaseModel):
    word_budget: Optional[int] = Field(None, ge=1)
    degree_bound: Optional[int] = Field(None, ge=1)
    expected_dim: Optional[int] = Field(None, ge=1)
    weights: Optional[Tuple[int, int]] = None
    s_search_depth: Optional[int] = Field(None, ge=0)


# a block value is a row-major matrix for matrix blocks, a coordinate list for table blocks
BlockValue = Union[List[List[str]], List[str]]


class ProblemFile(BaseModel):
    name: str = ""
    method: Literal[2, 3] = 3
    blocks: List[BlockModel] = Field(..., min_length=1)
    f_x: List[BlockValue]
    f_y: List[BlockValue]
    options: ProblemOptions = Field(default_factory=ProblemOptions)


class RelationsFile(BaseModel):
    relations: List[str]
    weights: Optional[Tuple[int, int]] = None
    bound: Optional[int] = Field(None, ge=1)


# table exports

class RationalFunctionModel(BaseModel):
    num: List[str] = Field(..., description="Numerator coefficients, lowest degree first")
    den: List[str] = Field(..., description="Monic denominator coefficients, lowest degree first")


class TableEntry(BaseModel):
    i: int
    k: int
    m: int
    num: List[str]
    den: List[str]


class DeformationTableFile(BaseModel):
    n: int = Field(..., ge=1)
    labels: List[str]
    identity: List[RationalFunctionModel]
    entries: List[TableEntry]
    digest: Optional[str] = None


class PolyTypeEntry(BaseModel):
    i: int
    k: int
    m: int
    sigma: List[str]


class PolyTypeTableFile(BaseModel):
    n: int
    h: List[str]
    entries: List[PolyTypeEntry]


class FiberEntry(BaseModel):
    i: int
    k: int
    m: int
    zeta: str


class FiberTableFile(BaseModel):
    n: int
    labels: List[str]
    identity: List[str]
    entries: List[FiberEntry]


# run reports

class BasisEntryReport(BaseModel):
    word: str
    q: str
    order: int
    pivot: int
    direction: List[str]


class StructureReportModel(BaseModel):
    dim: int
    radical_dim: int
    center_dim: int
    semisimple: bool
    shape: Optional[List[int]] = None
    shape_candidates: List[List[int]] = []


class PresentationReport(BaseModel):
    verdict: Literal["isomorphic", "inconclusive"]
    dimension: int
    exact: bool
    basis: List[str]
    memberships: Dict[str, bool]
    reason: str = ""


class CertificateReport(BaseModel):
    s_max: str
    denominator_master: List[str]
    semisimple_master_degree: int
    root_counts: Dict[str, int]
    pole_order: int
    generation_dimension: int
    squarefree_blocks: List[bool]
    reports: Dict[str, StructureReportModel]


class RunReport(BaseModel):
    command: str
    problem: str = ""
    n: Optional[int] = None
    basis: List[BasisEntryReport] = []
    words_scanned: Optional[int] = None
    pole_bound: Optional[int] = None
    table_digest: Optional[str] = None
    associative: Optional[bool] = None
    fiber: Optional[StructureReportModel] = None
    polytype_h: Optional[List[str]] = None
    presentation: Optional[PresentationReport] = None
    certificate: Optional[CertificateReport] = None
    specialization: Optional[Dict[str, StructureReportModel]] = None
    generation_dimension: Optional[int] = None
