"""Exception hierarchy shared across the package.

Two families matter to callers: usage errors (bad arguments, bad config,
unreadable files) and estimation failures (the data did not support an
estimate). The CLI maps them to exit codes 2 and 1 respectively; the HTTP
service maps them to 400 and 409.
"""


class SeastrainError(Exception):
    """Base class for all package errors."""


class UsageError(SeastrainError):
    """Caller-side problem: invalid arguments, config, or file contents."""


class EstimationError(SeastrainError):
    """The supplied data does not support the requested estimate."""


class InvalidArgumentError(UsageError, ValueError):
    """An argument violates an operation's preconditions."""


class ConfigError(UsageError):
    """A run configuration fails validation; message names the field."""


class FormatError(UsageError):
    """A record file cannot be parsed; message names the field or offset."""


class DegenerateFitError(UsageError):
    """Calibration requested with fewer than two distinct wave heights."""


class UndefinedCorrelationError(UsageError):
    """Pearson correlation of a constant series is undefined."""


class NoPeakError(EstimationError):
    """No spectral power in the requested analysis band."""


class WeakPeakError(EstimationError):
    """A peak exists but does not dominate the spectrum."""


class DegenerateCurveError(EstimationError):
    """Apparent wavenumber is zero; the wavelength-DOA locus is undefined."""


class InconsistentLayoutsError(EstimationError):
    """No direction of arrival is consistent with both cable layouts."""
