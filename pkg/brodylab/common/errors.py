"""Exception hierarchy shared by every brodylab module.

Each class also derives from the builtin it refines, so callers may catch
either the brodylab class or the builtin.
"""
from typing import Optional


class BrodyLabError(Exception):
    """Base class of all brodylab errors."""


class InvalidParameterError(BrodyLabError, ValueError):
    """A scalar parameter lies outside its documented range."""


class InvalidPointError(InvalidParameterError):
    """A homogeneous coordinate vector is identically zero."""


class ValidationError(BrodyLabError, ValueError):
    """A probability object, distortion matrix or config fails validation."""


class NotLocallyConstantError(BrodyLabError, ValueError):
    """The curve is not close to the gluing point on the checked disk."""


class UnsupportedCurveError(BrodyLabError, TypeError):
    """The curve variant lacks the structure an operation needs."""


class UnsupportedMeasureError(BrodyLabError, TypeError):
    """The sampler has no explicit parameter structure."""


class TargetUnreachableError(InvalidParameterError):
    """A rescaling target is outside the reachable range."""


class InfeasibleError(BrodyLabError, ValueError):
    """A distortion budget is below the minimum achievable distortion."""


class NumericError(BrodyLabError, ArithmeticError):
    """A numerical routine produced a non-finite value or failed to bracket."""

    def __init__(self, message: str, sample_index: Optional[int] = None):
        super().__init__(message)
        self.sample_index = sample_index


class UsageError(BrodyLabError):
    """The command line or an experiment config is malformed."""
