"""Exception types shared across the package."""


class VolmoeError(Exception):
    """Base class for all volmoe errors."""


class InvalidParameterError(VolmoeError, ValueError):
    """An argument violated a documented precondition."""


class DegenerateDistributionError(VolmoeError, ValueError):
    """A scale parameter collapsed to zero (constant input)."""


class SingularSystemError(VolmoeError, ValueError):
    """A linear system is rank deficient beyond the pivot tolerance."""


class DimensionError(VolmoeError, ValueError):
    """Array arguments have inconsistent or empty shapes."""


class NumericOverflowError(VolmoeError, ArithmeticError):
    """A computation produced a non-finite intermediate value."""


class ConfigError(VolmoeError, ValueError):
    """A configuration value is missing, unknown, or out of bounds."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"config field '{field}': {message}")


class DatasetParseError(VolmoeError, ValueError):
    """A dataset file could not be parsed."""

    def __init__(self, line_number: int, message: str):
        self.line_number = line_number
        super().__init__(f"line {line_number}: {message}")


class DatasetValidationError(VolmoeError, ValueError):
    """A parsed dataset violates a structural invariant."""


class CheckpointError(VolmoeError, ValueError):
    """A parameter checkpoint is missing fields or has the wrong version."""


class ReportError(VolmoeError, ValueError):
    """An experiment report is malformed or incomplete."""
