"""Exception taxonomy shared across the package.

The CLI maps these onto exit statuses: precondition/usage problems are
operational errors (exit >= 2), while a CheckFailed from a mathematical
assertion is a "computation ran, inequality violated" outcome (exit 1).
"""


class BoundsError(ValueError):
    """A size or truncation parameter is outside its supported range."""


class PreconditionError(ValueError):
    """An operation was called on inputs that violate its contract."""


class DomainMismatchError(PreconditionError):
    """Two fields that must share a grid live on different domains."""


class ConstructionError(RuntimeError):
    """A constructive step (witness build, search) could not be completed."""


class CheckFailed(RuntimeError):
    """A mathematical check that should hold was violated numerically."""
