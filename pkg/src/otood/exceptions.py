"""Exception hierarchy shared across the package.

Each class carries the process exit code the CLI maps it to:
2 for configuration/format/data problems, 3 for numerical-stability
failures, 4 for undefined metrics.
"""


class OtoodError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ConfigurationError(OtoodError):
    """Invalid parameter or mismatched problem dimensions."""

    exit_code = 2


class FormatError(OtoodError):
    """Malformed input file (bad magic, truncated payload, unparseable CSV)."""

    exit_code = 2


class DataError(OtoodError):
    """Input values violate a data contract (non-finite, zero rows, bad norms)."""

    exit_code = 2


class DegenerateInputError(DataError):
    """A quantity that must carry probability mass is empty or zero."""


class StabilityError(OtoodError):
    """Numerical overflow/underflow the requested mode cannot recover from."""

    exit_code = 3


class SingularityError(StabilityError):
    """A matrix required to be invertible has no usable spectrum."""


class MetricUndefinedError(OtoodError):
    """A detection metric was requested on input where it has no value."""

    exit_code = 4
