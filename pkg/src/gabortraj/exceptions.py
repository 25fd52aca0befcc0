"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: :class:`ConfigError` -> 2,
:class:`NumericalError` -> 3, :class:`PreconditionError` -> 4.
"""


class GaborTrajError(Exception):
    """Base class for all package errors."""


class ConfigError(GaborTrajError, ValueError):
    """Malformed experiment configuration."""


class PreconditionError(GaborTrajError, ValueError):
    """An operation was called outside its domain."""


class NumericalError(GaborTrajError, ArithmeticError):
    """A numerical procedure failed to deliver a trustworthy result."""


class IllPosedError(NumericalError):
    """Lower frame bound of a finite section is below the solver floor."""

    def __init__(self, message, lower_bound=None):
        super().__init__(message)
        self.lower_bound = lower_bound


class ConvergenceError(NumericalError):
    """Iterative solver stopped before reaching its tolerance."""
