"""Exception types shared across the package.

The CLI maps these onto process exit codes: config errors exit 2, input
data errors exit 3, numeric failures exit 4.
"""


class KernelshotError(Exception):
    """Base class for all package-specific errors."""


class ConfigError(KernelshotError):
    """Invalid or inconsistent experiment configuration."""


class DataError(KernelshotError):
    """Malformed or missing input data (feature CSVs, paths)."""


class NumericError(KernelshotError):
    """Numerically impossible result, e.g. an inverted probability bracket."""
