"""Exception types shared across the package."""


class FractalmixError(Exception):
    """Base class for all package errors."""


class ConfigError(FractalmixError):
    """Bad or missing configuration (CLI exit code 2)."""


class InvariantViolation(FractalmixError):
    """A structural invariant failed to hold (CLI exit code 3)."""


class NumericalError(FractalmixError):
    """A numerical tolerance or stability condition failed (CLI exit code 4)."""


class DomainError(FractalmixError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class OverflowScaleError(FractalmixError, OverflowError):
    """An inverse length scale exceeded the configured representable range."""


class CalibrationError(NumericalError):
    """Cutoff profile calibration could not meet all constraints."""


class ResolutionError(FractalmixError):
    """Requested grid too coarse for the smallest active length scale."""


class MemoryBudgetError(FractalmixError):
    """Estimated cache memory exceeds the configured budget."""


class ToleranceError(NumericalError):
    """A computed quantity missed its tolerance (e.g. flow-map Jacobian)."""


class OutOfWindowError(FractalmixError):
    """Time outside the interval covered by a cached flow window."""


class CapExceededError(FractalmixError):
    """Derivative order beyond the evaluable cap."""


class ConditionError(FractalmixError):
    """A required smallness condition between parameters is violated."""


class FitQualityError(NumericalError):
    """A regression fit fell below the required quality threshold."""
