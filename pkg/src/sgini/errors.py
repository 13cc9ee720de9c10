"""Exception types raised by the library.

The CLI maps each class to an exit status, so keep the hierarchy flat.
"""


class SGiniError(Exception):
    """Base class for every error raised by ``sgini``."""


class ParameterDomainError(SGiniError, ValueError):
    """An index order, level or distribution parameter is out of range."""


class InsufficientSampleError(SGiniError, ValueError):
    """The sample is too small for the requested statistic."""


class DataError(SGiniError, ValueError):
    """Input observations are malformed (non-positive, non-finite, unparsable)."""


class OracleSizeError(SGiniError, RuntimeError):
    """Brute-force enumeration would exceed the configured subset cap."""


class CalibrationError(SGiniError, RuntimeError):
    """A bootstrap calibration lost too many replicates to be trusted."""
