"""Exception hierarchy shared by all analysis modules."""


class TrendSymError(Exception):
    """Base class for every error raised by this package."""


class DataError(TrendSymError):
    """Input data cannot be analysed."""


class EmptySeries(DataError):
    """Fewer than two usable prices."""


class MalformedHeader(DataError):
    """CSV header lacks a required column."""


class InsufficientData(DataError):
    """Sample too small for the requested computation."""


class AllZeros(InsufficientData):
    """Every entry of the sample is exactly zero."""


class SeriesTooShort(DataError):
    """Price series shorter than the rolling window."""


class TooLarge(DataError):
    """Input exceeds the size limit of a quadratic-cost routine."""


class OutOfTableRange(TrendSymError):
    """Requested probability is not covered by the critical-value table."""


class NoSymmetryPoint(TrendSymError):
    """No candidate symmetry point falls below the critical value."""

    def __init__(self, message, curve=None):
        super().__init__(message)
        self.curve = curve
