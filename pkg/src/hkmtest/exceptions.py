"""Exception types raised by hkmtest."""


class HKMError(Exception):
    """Base class for all hkmtest errors."""


class InvalidDataError(HKMError, ValueError):
    """Input data is malformed: wrong shape, non-finite entries, bad parameters."""


class SingularCovarianceError(HKMError, ArithmeticError):
    """The sample covariance matrix is (numerically) singular.

    Usually means ``n <= d`` or a constant / collinear column.
    """


class DomainError(HKMError, ValueError):
    """A parameter lies outside the domain where a formula is defined."""


class NumericalError(HKMError, ArithmeticError):
    """A numerical procedure failed to converge or produced an invalid value."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})
