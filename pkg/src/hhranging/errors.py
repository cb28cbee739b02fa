"""Exception types shared across the package.

Each maps to a stable CLI exit code (see ``hhranging.cli``).
"""


class ParameterError(ValueError):
    """A physical or configuration parameter violates a precondition."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge to its required accuracy."""


class StatisticalFloorError(RuntimeError):
    """Too few error events for a statistically meaningful estimate."""
