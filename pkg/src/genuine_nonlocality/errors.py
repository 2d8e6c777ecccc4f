"""Exception hierarchy shared by every module of the package."""


class NonlocalityError(Exception):
    """Base class for all package errors."""


class ShapeError(NonlocalityError, ValueError):
    """Array or dimension mismatch."""


class DomainError(NonlocalityError, ValueError):
    """Parameters outside the range where a construction exists."""


class InputError(NonlocalityError, ValueError):
    """Malformed or invalid user input (files, matrices, layouts)."""


class PlanError(NonlocalityError, ValueError):
    """A composition plan violates connectivity or orthogonality."""


class BudgetError(NonlocalityError):
    """A verifier job exceeds the configured side-dimension cap."""


class NeedsExternalSeed(NonlocalityError):
    """No in-package construction exists; an externally supplied seed set is required."""
