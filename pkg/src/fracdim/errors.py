"""Exception types raised by the toolkit.

Each class carries an ``exit_code`` so the command line front end can map
failures to distinct process exit statuses.
"""


class FracDimError(Exception):
    exit_code = 10


class ConfigError(FracDimError, ValueError):
    exit_code = 3


class AllZero(FracDimError, ValueError):
    exit_code = 4


class NonVanishingZerothMoment(FracDimError, ValueError):
    exit_code = 4


class OrderExceedsCap(FracDimError, ValueError):
    exit_code = 4


class OutOfBounds(FracDimError, IndexError):
    exit_code = 5


class AlphaOutOfRange(FracDimError, ValueError):
    exit_code = 3


class DegenerateIncrement(FracDimError, ValueError):
    exit_code = 4


class NotNonNegativeDefinite(FracDimError, RuntimeError):
    exit_code = 6

    def __init__(self, message, min_eigenvalue=None):
        super().__init__(message)
        self.min_eigenvalue = min_eigenvalue


class InsufficientMargin(FracDimError, ValueError):
    exit_code = 5


class ZeroVariogram(FracDimError, ValueError):
    exit_code = 7


class MTooSmall(FracDimError, ValueError):
    exit_code = 3


class SingularWeightMatrix(FracDimError, ArithmeticError):
    exit_code = 8


class BoundaryAlpha(FracDimError, ValueError):
    exit_code = 3


class TooFewReplications(FracDimError, ValueError):
    exit_code = 3


class ReplicationError(FracDimError):
    """Wraps a failure inside one Monte Carlo replication."""

    def __init__(self, index, cause):
        super().__init__(f"replication {index} failed: {type(cause).__name__}: {cause}")
        self.index = index
        self.cause = cause
        self.exit_code = getattr(cause, "exit_code", FracDimError.exit_code)
