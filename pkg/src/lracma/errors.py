"""Exception hierarchy shared across the library."""


class LracmaError(Exception):
    """Base class for all library errors."""


class InvalidMatrix(LracmaError):
    """Matrix input is malformed (non-square, non-finite entries, ...)."""


class NotPositiveDefinite(LracmaError):
    """Matrix is not positive definite even after eigenvalue clamping."""


class NumericalRange(LracmaError):
    """A computation over- or underflowed to a non-finite/degenerate value."""


class InvalidConfig(LracmaError):
    """A configuration value is out of its allowed range or unknown."""


class InvalidInput(LracmaError):
    """A runtime input (e.g. a candidate point) is malformed."""


class ObjectiveNaN(LracmaError):
    """An objective evaluation returned NaN."""
