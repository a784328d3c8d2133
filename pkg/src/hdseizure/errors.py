"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI and the service:
  UsageError -> 1, DataError -> 2, TrainingFailure -> 3.
"""


class HdszError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class UsageError(HdszError):
    """Bad arguments or an invalid parameter combination."""

    exit_code = 1


class DataError(HdszError):
    """Malformed, truncated or invariant-violating input data."""

    exit_code = 2


class UnsupportedRateError(DataError):
    """Input sampling rate cannot be reduced to 512 Hz by integer decimation."""


class DimensionMismatchError(DataError):
    """Two hypervectors (or a vector and an accumulator) differ in dimensionality."""


class TrainingFailure(HdszError):
    """No vote threshold >= 1 detects the training seizure; prototypes inadequate."""

    exit_code = 3
