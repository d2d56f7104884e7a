"""Exception types shared across the package.

The CLI maps UsageError to exit code 1 and NumericError to exit code 2.
"""


class SimgoodError(Exception):
    """Base class for all errors raised by this package."""


class UsageError(SimgoodError):
    """Invalid input: bad parameter values, shape mismatches, malformed files."""


class NumericError(SimgoodError):
    """Numeric failure: non-finite results, non-convergence, solver breakdown.

    ``last_value`` carries the final iterate/estimate when an iterative
    routine gives up, so callers can inspect how far it got.
    """

    def __init__(self, message: str, last_value=None):
        super().__init__(message)
        self.last_value = last_value
