"""Exception taxonomy shared across the toolkit.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericError -> 4.
"""


class PreictalError(Exception):
    pass


class ConfigError(PreictalError):
    """Invalid or inconsistent configuration."""


class DataError(PreictalError):
    """Malformed input data or violated data contract."""


class NumericError(PreictalError):
    """Numerical failure (divergence, NaN loss, degenerate scaling)."""
