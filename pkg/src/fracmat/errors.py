"""Exception hierarchy shared by all fracmat modules."""

from __future__ import annotations

__all__ = [
    "DegenerateDiagonal",
    "DegenerateVariables",
    "DivergentTail",
    "EvalDomainError",
    "FracmatError",
    "InversionFailure",
    "NonMonotoneErrors",
    "NonMonotoneSamples",
    "NonPositiveDiagonal",
    "NonVanishingAtA",
    "NonVanishingAtB",
    "NumericalBreakdown",
    "OracleNotConverged",
    "OutOfRange",
    "ParseError",
    "ToleranceNotMet",
    "UnknownCatalogEntry",
]



class FracmatError(Exception):
    """Base class for every error raised by fracmat."""


class DegenerateVariables(FracmatError, ValueError):
    """Variables are too close together for a rational (divided) formula."""


class DegenerateDiagonal(FracmatError, ValueError):
    """A two-band matrix has repeated (or nearly repeated) diagonal entries."""


class NonPositiveDiagonal(FracmatError, ValueError):
    """A principal real power was requested for a matrix with a_k <= 0."""


class NumericalBreakdown(FracmatError, ArithmeticError):
    """A computation produced non-finite values or failed its self-check."""


class NonMonotoneSamples(FracmatError, ValueError):
    """Samples of g are not strictly increasing along the grid."""


class ToleranceNotMet(FracmatError, ArithmeticError):
    """An adaptive quadrature could not reach the requested tolerance."""


class DivergentTail(FracmatError, ValueError):
    """An improper integral does not converge at infinity."""


class NonVanishingAtA(FracmatError, ValueError):
    """Left-sided operators require f(a) = 0."""


class NonVanishingAtB(FracmatError, ValueError):
    """Right-sided operators require f(b) = 0."""


class ParseError(FracmatError, ValueError):
    """Syntax error in an expression string."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = tuple(expected)
        detail = f" (expected one of: {', '.join(self.expected)})" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


class EvalDomainError(FracmatError, ValueError):
    """An expression was evaluated outside the domain of one of its functions."""


class OutOfRange(FracmatError, ValueError):
    """A value lies outside the image of a monotone function."""


class InversionFailure(FracmatError, ArithmeticError):
    """Numeric inversion of a monotone function did not converge."""


class UnknownCatalogEntry(FracmatError, KeyError):
    """Requested catalog function does not exist."""


class OracleNotConverged(FracmatError, ArithmeticError):
    """The reference solution of a convergence sweep is not trustworthy."""


class NonMonotoneErrors(UserWarning):
    """Errors of a convergence sweep do not decrease monotonically."""
