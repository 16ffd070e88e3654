"""Numerical checks of Grüss-type refinements of mean and covariance inequalities."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BoundsViolated,
    DimensionMismatch,
    DomainViolation,
    GrussError,
    NoConvergence,
    NonPositiveInput,
    NotHermitian,
)
from .hermitian import (  # noqa: E402
    LoewnerReport,
    SpectralDecomposition,
    abs_op,
    apply_function,
    eigh,
    eigvalsh,
    loewner_leq,
    operator_norm,
)
from .means import MeanKind, MeanParams, scalar_mean  # noqa: E402
from .opmeans import PositivePair, op_mean, relative_entropy  # noqa: E402
from .quadrature import QuadratureConfig, integrate  # noqa: E402
from .report import InequalityReport  # noqa: E402
from .weights import MonotoneWeight, WeightKind, weight  # noqa: E402
from .scalar_suites import check_gruss_base, check_scalar_refinement, compare_eq6_eq7  # noqa: E402
from .operator_suites import check_operator_refinement  # noqa: E402
from .covariance import (  # noqa: E402
    SpectrumBounds,
    UnitVector,
    check_gruss_operator,
    check_kittaneh_refinement,
    check_thm13,
    check_thm51,
    check_x3_and_rem11,
    lemma_y1,
    numerical_radius,
)

__all__ = [
    "BoundsViolated", "DimensionMismatch", "DomainViolation", "GrussError", "NoConvergence",
    "NonPositiveInput", "NotHermitian", "LoewnerReport", "SpectralDecomposition", "abs_op",
    "apply_function", "eigh", "eigvalsh", "loewner_leq", "operator_norm", "MeanKind", "MeanParams",
    "scalar_mean", "PositivePair", "op_mean", "relative_entropy", "QuadratureConfig", "integrate",
    "InequalityReport", "MonotoneWeight", "WeightKind", "weight",
    "check_gruss_base", "check_scalar_refinement", "compare_eq6_eq7", "check_operator_refinement",
    "SpectrumBounds", "UnitVector", "check_gruss_operator", "check_kittaneh_refinement", "check_thm13",
    "check_thm51", "check_x3_and_rem11", "lemma_y1", "numerical_radius",
]
