"""Exception hierarchy shared by all hrmod modules."""

from __future__ import annotations


class HRModError(Exception):
    """Base class for every error raised by hrmod."""


class ValidationError(HRModError, ValueError):
    """Input matrix fails a structural requirement."""


class NotSymmetric(ValidationError):
    pass


class NonzeroDiagonal(ValidationError):
    pass


class NotCND(ValidationError):
    """Matrix is not strictly conditionally negative definite."""

    def __init__(self, message: str, eigenvalue: float):
        super().__init__(message)
        self.eigenvalue = eigenvalue


class BadKernel(ValidationError):
    """Precision matrix kernel is not exactly span(1)."""


class BadIndexSets(ValidationError):
    pass


class BadRank(ValidationError):
    pass


class KernelOrthogonalToOnes(ValidationError):
    pass


class BadGraph(ValidationError):
    pass


class Disconnected(BadGraph):
    pass


class SingularBlock(HRModError, ArithmeticError):
    """A block that must be inverted is numerically singular."""


class SingularCM(SingularBlock):
    pass


class ConvergenceFailure(HRModError, ArithmeticError):
    pass


class NonPositiveArgument(HRModError, ArithmeticError):
    """A logarithm argument that must be positive is not."""


class RoundTripFailure(HRModError, ArithmeticError):
    pass


class UnsupportedSize(HRModError, ValueError):
    pass


class TooLarge(UnsupportedSize):
    pass


class CriterionDisagreement(HRModError):
    """Equivalent criteria disagree at the working tolerance."""

    def __init__(self, message: str, residuals: dict):
        super().__init__(message)
        self.residuals = residuals
