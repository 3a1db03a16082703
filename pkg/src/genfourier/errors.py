"""Exception hierarchy shared by every module."""


class GenFourierError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GenFourierError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConvergenceError(GenFourierError, ArithmeticError):
    """A series or quadrature could not reach the requested accuracy."""

    def __init__(self, message, **context):
        super().__init__(message)
        self.context = context


class CapacityError(GenFourierError, OverflowError):
    """A table or expansion was requested beyond its guarded size."""


class DivergenceError(GenFourierError, ArithmeticError):
    """An integral is requested below its convergence threshold."""


class PlanError(GenFourierError, ValueError):
    """Grid functions and transform plans do not match."""


class DataError(GenFourierError, ValueError):
    """Sampled data contain non-finite values."""
