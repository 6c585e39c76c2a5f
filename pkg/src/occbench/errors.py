"""Exception types shared across the package."""


class OccbenchError(Exception):
    """Base class for all package errors."""


class DimensionMismatchError(OccbenchError):
    """Two rasters that must share dimensions do not."""


class EmptyMaskError(OccbenchError):
    """An operation that needs foreground pixels got an empty mask."""


class DegenerateTransformError(OccbenchError):
    """A geometric transform produced an empty mask."""


class GenerationExhaustedError(OccbenchError):
    """Rejection sampling ran out of attempts without landing in the bin."""

    def __init__(self, message, attempts_used):
        super().__init__(message)
        self.attempts_used = attempts_used


class EmptyDatasetError(OccbenchError):
    """A dataset directory yielded no usable image/mask pairs."""


class UndefinedDegradationError(OccbenchError):
    """Relative degradation is undefined when the clean score is zero."""
