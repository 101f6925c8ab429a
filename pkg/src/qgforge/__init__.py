"""Finite left quasigroups, quasigroups and fan quasigroups as Cayley tables."""
from __future__ import annotations

__version__ = "0.1.0"

from .core import (
    ElementSubset,
    FiniteMagma,
    div_l,
    div_r,
    find_unit,
    is_left_quasigroup,
    is_right_quasigroup,
    magma_from_table,
    one_sided_units,
)
from .errors import (
    AxiomError,
    CapacityError,
    ConsistencyError,
    ConstructionError,
    DomainError,
    PreconditionError,
    QGError,
    SearchExhausted,
)
from .structure import (
    FanCertificate,
    StructureReport,
    conj_maps,
    fan_certificate,
    is_normal,
    quotient,
    structure_report,
)

__all__ = [
    "AxiomError", "CapacityError", "ConsistencyError", "ConstructionError", "DomainError",
    "ElementSubset", "FanCertificate", "FiniteMagma", "PreconditionError", "QGError",
    "SearchExhausted", "StructureReport", "conj_maps", "div_l", "div_r", "fan_certificate",
    "find_unit", "is_left_quasigroup", "is_normal", "is_right_quasigroup", "magma_from_table",
    "one_sided_units", "quotient", "structure_report",
]
