"""Exception types shared across the package.

The split mirrors the CLI exit-code contract: bad input (2), unmet
preconditions (3), and blown resource caps (4).
"""


class InputError(ValueError):
    """Malformed or inconsistent input (dimension mismatch, bad flag, ...)."""


class InsufficientDataError(InputError):
    """The sample is too small for the requested estimator."""


class ResourceCapError(RuntimeError):
    """An enumeration would exceed its configured cap; pass a budget instead."""
