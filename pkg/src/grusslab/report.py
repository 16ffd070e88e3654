from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Any

from .hermitian import LoewnerReport


@dataclass
class InequalityReport:
    """Outcome of one inequality check.

    ``margin`` is ``rhs - lhs`` for scalar statements and the smallest
    eigenvalue of ``RHS - LHS`` for operator statements; ``holds`` is
    exactly ``margin >= -tol``.
    """

    suite_id: str
    inputs: dict[str, Any]
    lhs: float | LoewnerReport | None
    rhs: float | None
    margin: float
    tol: float
    refinement_gain: float | None = None
    quadrature_error: float = 0.0
    holds: bool = True
    details: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)
