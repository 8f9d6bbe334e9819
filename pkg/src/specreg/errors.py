"""Exception hierarchy shared by the library and the CLI."""


class SpecregError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(SpecregError, ValueError):
    """An input violates a documented precondition."""


class SynthesisError(SpecregError, RuntimeError):
    """Scene synthesis failed (e.g. non positive-definite bin covariance)."""


class NumericalError(SpecregError, RuntimeError):
    """A numerical routine failed where the model says it should not."""


class MissingTruthError(SpecregError, RuntimeError):
    """An operation requiring a ground-truth sheet was given data without one."""
