"""Exception types raised by psdfact operations."""


class PsdfactError(Exception):
    """Base class for all psdfact errors."""


class DimMismatch(PsdfactError):
    """Operands have incompatible dimensions."""


class NotPsd(PsdfactError):
    """A matrix required to be positive semidefinite is not."""


class NotPd(PsdfactError):
    """A matrix required to be positive definite is not."""


class Singular(PsdfactError):
    """A matrix that must be inverted is singular to working precision."""


class IterationFailure(PsdfactError):
    """An iterative eigenvalue computation failed to converge."""


class ZeroData(PsdfactError):
    """The data matrix or tensor is identically zero."""


class DivisionByZero(PsdfactError):
    """A multiplicative-update denominator entry is zero or negative."""
