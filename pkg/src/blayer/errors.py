"""Exception types shared across the package."""

__all__ = [
    "BlayerError",
    "ConfigError",
    "CollisionError",
    "IterationLimitError",
    "TwoRouteMismatch",
    "DomainTooSmallError",
    "ConsistencyError",
]


class BlayerError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(BlayerError):
    """Invalid configuration file or CLI arguments."""


class CollisionError(BlayerError):
    """Particle configuration has coincident points under a singular kernel."""


class IterationLimitError(BlayerError):
    """An iterative solver hit its iteration cap before converging.

    Carries the best iterate found so far in `best`.
    """

    def __init__(self, message, best=None, residual=None):
        super().__init__(message)
        self.best = best
        self.residual = residual


class TwoRouteMismatch(BlayerError):
    """Two independent numerical routes to the same quantity disagree.

    Carries both values so callers can report them.
    """

    def __init__(self, message, first, second):
        super().__init__(message)
        self.first = first
        self.second = second


class DomainTooSmallError(BlayerError):
    """A truncated computational domain visibly contaminates the answer."""


class ConsistencyError(BlayerError):
    """An internal identity that should hold numerically failed to."""
