"""Table files: JSON exports of deformation, fiber and polynomial-type tables,
plus the CSV flattening of the fiber table."""
import csv
import io
import json
import logging
from pathlib import Path

import numpy as np
from pydantic import BaseModel, ValidationError

from flatdeform.core.arithmetic import RationalFunction, UniPolynomial, as_rational
from flatdeform.core.engine import DeformationTable, PolyTypeTable, special_fiber
from flatdeform.errors import InputError
from flatdeform.models.schemas import (
    DeformationTableFile, FiberEntry, FiberTableFile, PolyTypeEntry, PolyTypeTableFile,
    RationalFunctionModel, TableEntry,
)

logger = logging.getLogger(__name__)


def _coeffs(p: UniPolynomial) -> list[str]:
    return [str(c) for c in p.coeffs]


def _rf_model(c: RationalFunction) -> RationalFunctionModel:
    return RationalFunctionModel(num=_coeffs(c.num), den=_coeffs(c.den))


def _rf_from(num: list[str], den: list[str], where: str) -> RationalFunction:
    try:
        numerator = UniPolynomial([as_rational(c) for c in num], "t")
        denominator = UniPolynomial([as_rational(c) for c in den], "t")
    except InputError as e:
        raise InputError(f"{where}: {e.detail}") from e
    if denominator.is_zero:
        raise InputError(f"{where}: zero denominator")
    return RationalFunction(numerator, denominator)


def table_to_model(table: DeformationTable) -> DeformationTableFile:
    return DeformationTableFile(
        n=table.n,
        labels=list(table.labels),
        identity=[_rf_model(c) for c in table.identity],
        entries=[TableEntry(i=i, k=k, m=m, num=_coeffs(c.num), den=_coeffs(c.den))
                 for i, k, m, c in table.entries() if not c.is_zero],
        digest=table.digest(),
    )


def table_from_model(model: DeformationTableFile) -> DeformationTable:
    n = model.n
    if len(model.labels) != n or len(model.identity) != n:
        raise InputError(f"table file: labels and identity must have {n} entries")
    c = np.empty((n, n, n), dtype=object)
    for idx in np.ndindex(c.shape):
        c[idx] = RationalFunction.zero()
    for pos, entry in enumerate(model.entries):
        if not all(0 <= v < n for v in (entry.i, entry.k, entry.m)):
            raise InputError(f"entries[{pos}]: index out of range for n = {n}")
        c[entry.i, entry.k, entry.m] = _rf_from(entry.num, entry.den, f"entries[{pos}]")
    identity = [_rf_from(x.num, x.den, f"identity[{j}]") for j, x in enumerate(model.identity)]
    table = DeformationTable(c, labels=model.labels, identity=identity)
    if model.digest is not None and model.digest != table.digest():
        logger.warning("Table digest does not match its entries; the file was edited")
    return table


def parse_table(text: str) -> DeformationTable:
    try:
        model = DeformationTableFile.model_validate_json(text)
    except ValidationError as e:
        raise InputError(f"invalid table file: {e.error_count()} problems, first: {e.errors()[0]['msg']}") from e
    return table_from_model(model)


def is_table_document(text: str) -> bool:
    try:
        data = json.loads(text)
    except json.JSONDecodeError:
        return False
    return isinstance(data, dict) and "entries" in data and "blocks" not in data


def fiber_to_model(table: DeformationTable) -> FiberTableFile:
    fiber = special_fiber(table)
    return FiberTableFile(
        n=table.n,
        labels=list(table.labels),
        identity=[str(x) for x in fiber.identity],
        entries=[FiberEntry(i=i, k=k, m=m, zeta=str(value))
                 for (i, k, m), value in np.ndenumerate(fiber.constants) if value != 0],
    )


def fiber_csv(table: DeformationTable) -> str:
    """Nonzero zeta entries as ``i,k,m,zeta`` rows."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["i", "k", "m", "zeta"])
    for entry in fiber_to_model(table).entries:
        writer.writerow([entry.i, entry.k, entry.m, entry.zeta])
    return buf.getvalue()


def polytype_to_model(pt: PolyTypeTable) -> PolyTypeTableFile:
    return PolyTypeTableFile(
        n=pt.n,
        h=_coeffs(pt.h),
        entries=[PolyTypeEntry(i=i, k=k, m=m, sigma=_coeffs(value))
                 for (i, k, m), value in np.ndenumerate(pt.sigma) if not value.is_zero],
    )


def write_text(path, text: str):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
    logger.info(f"Wrote {path}")


def write_model(path, model: BaseModel):
    write_text(path, model.model_dump_json(indent=2) + "\n")
