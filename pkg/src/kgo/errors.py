"""Exception types shared across the package."""


class KgoError(Exception):
    """Base class for all errors raised by this package."""


class DataError(KgoError):
    """Malformed input data: files, column specs, model payloads."""


class DimensionError(KgoError):
    """Incompatible or out-of-range dimensions."""


class NumericalError(KgoError):
    """Numerical failure: rank deficiency, zero projection, non-SPD matrix."""
