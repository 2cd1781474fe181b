"""Exception hierarchy shared across the package.

Each class maps to one CLI exit code so failures stay distinguishable
from shell scripts (see ``weierdim.cli``).
"""


class WeierdimError(Exception):
    """Base class for all package errors."""

    exit_code = 1


class ConfigError(WeierdimError):
    """Malformed configuration, schema violation or bad parameter."""

    exit_code = 2


class InfeasibleError(WeierdimError):
    """Request cannot be met within numeric limits (depth caps, accuracy)."""

    exit_code = 3


class ValidityError(WeierdimError):
    """Scale or index outside the validity window of a truncation/table."""

    exit_code = 3


class CheckFailedError(WeierdimError):
    """A verification check did not pass."""

    exit_code = 4


class OutputError(WeierdimError):
    """I/O failure while writing artifacts."""

    exit_code = 5


class IndexRangeError(ConfigError):
    """Sequence index outside the representable or tabulated range."""
