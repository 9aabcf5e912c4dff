"""Exception types shared across the package."""


class WeakBoundsError(Exception):
    """Base class for all package-specific errors."""


class FormatError(WeakBoundsError):
    """Malformed input data or files (ragged tuples, bad CSV/JSON, off-simplex rows)."""


class CoverageError(WeakBoundsError):
    """A weak-label signature present in the data is missing from the label model."""


class NumericalError(WeakBoundsError):
    """Non-finite values encountered during optimization.

    Carries the last good iterate when one exists.
    """

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class InsufficientSampleError(WeakBoundsError):
    """An operation needs more samples than the dataset provides."""
