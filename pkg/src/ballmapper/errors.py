"""Exception hierarchy shared across the engine.

The CLI maps these onto exit codes: ValidationError -> 2, DataError -> 3,
NumericError -> 4.
"""


class BallMapperError(Exception):
    """Base class for all engine errors."""


class ValidationError(BallMapperError):
    """Bad parameters or configuration (unknown column, epsilon <= 0, ...)."""


class DataError(BallMapperError):
    """Malformed or insufficient input data (parse failures, empty tables)."""


class NumericError(BallMapperError):
    """Numeric failure (rank deficiency, undefined quantile, ...)."""
