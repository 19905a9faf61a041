"""Exception and warning types shared across the package."""


class CknError(Exception):
    """Base class for all errors raised by cknlab."""


class DegenerateParams(CknError, ValueError):
    """Parameters outside the range where an operation is defined."""


class DomainError(CknError, ValueError):
    """A point lies outside the domain of a model space."""


class OriginError(DomainError):
    """The origin has no cylindrical coordinates."""


class BoundaryError(CknError, ValueError):
    """A finite-difference stencil leaves the domain of the field."""


class MissingZ(CknError, ValueError):
    """The normalization constant has not been attached to the parameters."""


class NonFinite(CknError, FloatingPointError):
    """A quadrature node produced a non-finite value."""


class PoleError(CknError, ZeroDivisionError):
    """A coefficient formula hits one of its poles."""


class PositivityError(CknError, ValueError):
    """A function required to be positive is not."""


class SpecError(CknError, ValueError):
    """Inconsistent extremal-function specification."""


class ConstantMismatch(CknError, ArithmeticError):
    """Two derivations of the same constant disagree."""

    def __init__(self, message, report):
        super().__init__(message)
        self.report = report


class OutsideFSWarning(UserWarning):
    """Parameters lie outside the Felli-Schneider region."""


class HardyOverflowWarning(RuntimeWarning):
    """The Hardy constant overflowed as a approaches its critical value."""
