"""Exception types shared across the package."""


class ConvexTimeError(Exception):
    """Base class for errors raised by this package."""


class DimensionError(ConvexTimeError, ValueError):
    """A vector or set has the wrong dimension."""


class ValidationError(ConvexTimeError, ValueError):
    """A set fails a structural requirement (empty, degenerate row, 0 not interior...)."""


class UnsupportedError(ConvexTimeError):
    """The requested combination of sets or the problem scale is not supported."""


class UnattainedError(ConvexTimeError):
    """An infimum is not attained, so no witness point exists."""
