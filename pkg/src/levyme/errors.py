"""Exception hierarchy.

The split matters for the CLI exit-code contract: model/input validation
problems exit with code 2, violated mathematical preconditions (wrong case,
killing rate out of range, ...) with code 3.
"""


class LevyMEError(Exception):
    """Base class for all package errors."""


class ValidationError(LevyMEError):
    """Malformed or inconsistent model/input data."""


class PreconditionError(LevyMEError):
    """A documented mathematical precondition does not hold."""


class NumericsError(LevyMEError):
    """Internal numerical consistency check failed (spurious imaginary part,
    root count mismatch, non-converged contour, ...)."""
