"""Exception hierarchy.

The CLI maps these onto exit codes: InvalidInputError (bad matrices, bad
config) -> 1, NumericalError and subclasses -> 2, I/O failures -> 3.
"""


class GprotError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(GprotError, ValueError):
    """Malformed input: wrong shape, non-finite entries, bad parameters."""


class NumericalError(GprotError, ArithmeticError):
    """A computation is undefined or unstable for the given values."""


class DegenerateProjectionError(NumericalError):
    """Orthogonal projection target is rank deficient (smallest singular
    value below 1e-12), so the nearest orthogonal matrix is not unique."""


class ZeroCommunalityError(NumericalError):
    """A loading row has (near) zero norm; row normalization is undefined."""


class DegenerateVariableError(NumericalError):
    """A data column has (near) zero variance; correlations are undefined."""


class InvalidCorrelationError(NumericalError):
    """Matrix is not a valid correlation matrix (eigenvalue < -1e-10)."""


class UndefinedCongruenceError(NumericalError):
    """Congruence of a zero vector is undefined."""


class InsufficientCasesError(InvalidInputError):
    """Too few cases for the requested population or sample."""
