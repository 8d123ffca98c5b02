"""Exception types shared across the package."""


class SddError(Exception):
    """Base class for all library errors."""


class DomainError(SddError, ValueError):
    """An argument lies outside the domain an operation accepts."""


class DelayRangeError(SddError, ValueError):
    """A delay evaluation left the admissible range."""


class NonDifferentiableError(SddError, ValueError):
    """Derivative requested at a kink of the delay functional."""


class DegenerateFitError(SddError, RuntimeError):
    """A regression had no usable variation to fit."""


class InapplicableError(SddError, RuntimeError):
    """The operation's hypotheses are not met by, or not declared for, the problem."""


class SingularPivotError(SddError, ArithmeticError):
    """Denominator of the transformed right-hand side vanished."""


class IntegrationAbort(SddError, RuntimeError):
    """Integration stopped early; ``partial`` carries the committed samples."""

    def __init__(self, message, partial=None):
        super().__init__(message)
        self.partial = partial


class ExtrapolationWarning(UserWarning):
    """History was read slightly beyond the last committed node."""
