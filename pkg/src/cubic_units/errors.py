"""Exception hierarchy shared by all modules."""


class CubicUnitsError(Exception):
    """Base class for every error raised by this package."""


class ParameterMismatch(CubicUnitsError, ValueError):
    """Two operands live in orders Z[rho] for different parameters."""


class NotAUnit(CubicUnitsError, ValueError):
    """An element whose norm is not +-1 was used where a unit is required."""


class DomainError(CubicUnitsError, ValueError):
    """An argument lies outside the range where a formula is valid."""


class PrecisionExhausted(CubicUnitsError, ArithmeticError):
    """Interval enclosures could not certify a result at the available precision."""


class VerificationFailed(CubicUnitsError, AssertionError):
    """An exact post-hoc check disagreed with a numerically derived answer."""


class CertificationFailed(CubicUnitsError, ArithmeticError):
    """A strict inequality could not be certified by disjoint intervals."""


class MismatchAgainstFixture(CubicUnitsError, AssertionError):
    """Reproduced solutions differ from the shipped table."""

    def __init__(self, message, diff=None):
        super().__init__(message)
        self.diff = diff or {}
