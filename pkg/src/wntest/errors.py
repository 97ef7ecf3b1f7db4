"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: config errors -> 2, data/format
errors -> 3, numerical errors -> 4.
"""


class WntestError(Exception):
    """Base class for all package errors."""


class ArgumentError(WntestError):
    """Invalid argument to a library function."""


class FormatError(WntestError):
    """Malformed input file (bad magic, truncated payload, ...)."""


class NumericalError(WntestError):
    """Numerical failure, e.g. Cholesky of a non-PD matrix."""


class DegenerateSequenceError(WntestError):
    """Zero-variance sequence: cannot be standardized.

    Scoring code maps this to a +inf outlier score; see the batch
    scoring helpers.
    """


class ConfigError(WntestError):
    """Invalid run configuration (missing paths, empty test list, ...)."""
