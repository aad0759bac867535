"""
Error hierarchy for the CSSD library.

Every error raised by the numerical code derives from ``CssdError`` and falls
into one of three families. The command line maps each family to an exit code:

- ``CssdParameterError``  -> 2 (bad flags or parameters)
- ``CssdDataError``       -> 3 (bad or unreadable input data)
- ``CssdNumericalError``  -> 4 (numerical failure)
"""

from typing import Optional


class CssdError(Exception):
    """Base class for all CSSD errors."""

    exit_code = 1

    def __init__(self, message: str = "", index: Optional[int] = None):
        self.index = index
        if index is not None and message:
            message = f"{message} (index {index})"
        super().__init__(message or self.__class__.__name__)


class CssdDataError(CssdError, ValueError):
    """Input data violates a domain invariant."""

    exit_code = 3


class CssdParameterError(CssdError, ValueError):
    """A parameter or index is outside its valid range."""

    exit_code = 2


class CssdNumericalError(CssdError, ArithmeticError):
    """The numerical procedure failed."""

    exit_code = 4


# Data errors

class EmptyInput(CssdDataError):
    pass


class NonFiniteValue(CssdDataError):
    pass


class NonPositiveDelta(CssdDataError):
    pass


class DimensionMismatch(CssdDataError):
    pass


class TooFewPoints(CssdDataError):
    pass


class NonIncreasingX(CssdDataError):
    pass


class NonPositiveGap(CssdDataError):
    pass


class DegenerateFold(CssdDataError):
    pass


class InputFormatError(CssdDataError):
    pass


# Parameter errors

class InvalidP(CssdParameterError):
    pass


class InvalidGamma(CssdParameterError):
    pass


class BadFoldCount(CssdParameterError):
    pass


class OutOfDomain(CssdParameterError):
    pass


class TooLargeForOracle(CssdParameterError):
    pass


class InvalidIndex(CssdParameterError):
    pass


# Numerical errors

class CorruptTraceback(CssdNumericalError):
    pass


class OracleFailure(CssdNumericalError):
    pass


class SingularFactor(CssdNumericalError):
    pass


# Command line

class UsageError(CssdParameterError):
    """Invalid command-line flags."""
