"""Exception hierarchy shared by every module."""


class GrussError(Exception):
    """Base class for library errors."""


class NotHermitian(GrussError, ValueError):
    pass


class DimensionMismatch(GrussError, ValueError):
    pass


class DomainViolation(GrussError, ValueError):
    """An eigenvalue falls outside the domain of a scalar function."""


class NonPositiveInput(GrussError, ValueError):
    pass


class NoConvergence(GrussError, ArithmeticError):
    """An iterative routine exhausted its iteration budget."""


class BoundsViolated(GrussError, ValueError):
    """A matrix is not sandwiched by the declared spectral bounds."""
