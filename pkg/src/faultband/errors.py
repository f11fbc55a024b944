"""Exception types shared across the package."""


class FaultbandError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(FaultbandError, ValueError):
    """A configuration value lies outside its documented domain."""


class SizeError(FaultbandError, ValueError):
    """An input is too short or mis-shaped for the requested operation."""


class IngestionError(FaultbandError):
    """An input file could not be read or parsed."""


class NumericalError(FaultbandError, ArithmeticError):
    """A computation produced non-finite intermediate values."""
