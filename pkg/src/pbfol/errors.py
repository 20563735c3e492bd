"""Exception types shared across the package."""


class PbfolError(Exception):
    """Base class for package errors."""


class DegenerateFoliationError(PbfolError):
    """A construction produced the zero form (e.g. a field proportional to the radial one)."""


class PreconditionError(PbfolError, ValueError):
    """An operation was called on input violating its documented precondition."""


class NotEigenFieldError(PreconditionError):
    """A field is not an eigenvector of the adjoint action of the weight field."""
