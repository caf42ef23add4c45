"""Exception hierarchy shared across the package."""


class Su11Error(Exception):
    """Base class for all package-specific errors."""


class ConfigError(Su11Error):
    """A configuration file or parameter set is invalid."""


class DataError(Su11Error):
    """Input data (CSV, scan table) is malformed or fails a precondition."""


class EmptyWindowError(DataError):
    """A post-selection window rejected every pulse at some scan position."""


class ConvergenceError(Su11Error):
    """An iterative numerical procedure exceeded its iteration cap."""


class TruncationError(Su11Error):
    """A Fock-space cutoff is too small for the requested squeezing."""


class InconsistentMeasurementWarning(UserWarning):
    """Extracted parameters violate a physical bound (e.g. transmission > 1)."""
