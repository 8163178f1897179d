"""Exception hierarchy.

``ContractViolation`` covers bad inputs (shape mismatches, broken
preconditions); the CLI maps it to exit code 2.  The remaining classes name a
specific mathematical obstruction so callers can tell them apart.
"""


class MQVError(Exception):
    """Base class for every error raised by this package."""


class ContractViolation(MQVError, ValueError):
    pass


class ModeError(ContractViolation):
    """Exact and float data were mixed, or an exact-only routine got floats."""


class DomainError(MQVError, ArithmeticError):
    """A factor ``1 + x_h x_hbar`` (or a loop map) is singular."""

    def __init__(self, message, arrow=None):
        super().__init__(message)
        self.arrow = arrow


class FunctorInapplicable(ContractViolation):
    """Reflection or convolution requested at a vertex carrying a loop."""


class EmptinessError(MQVError):
    """The reflected dimension vector has a negative entry."""

    def __init__(self, message, dims=None):
        super().__init__(message)
        self.dims = dims


class StabilityViolation(MQVError):
    """A map that stability forces to be injective/surjective is not."""


class GenerationFailure(MQVError):
    """The random instance generator ran out of attempts."""
