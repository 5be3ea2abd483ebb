"""Exception types shared across the package.

Everything user-facing derives from ValueError or RuntimeError so that
callers who do not care about the fine distinctions can catch the usual
builtins.  The CLI maps these onto exit codes.
"""

from __future__ import annotations


class GridError(ValueError):
    """A grid was constructed or used inconsistently (bad spacing, missing halo)."""


class RangeError(ValueError):
    """A geometric query left the sampled region (ball exits the grid, too few radii)."""


class ConfigError(ValueError):
    """A problem description is malformed or infeasible as declared."""


class SolverError(RuntimeError):
    """An iterative solve did not converge within its iteration budget."""

    def __init__(self, message: str, residual: float | None = None):
        super().__init__(message)
        self.residual = residual


class TheoremViolation(RuntimeError):
    """A certified structural prediction failed on the computed data.

    Raised by checks that encode proved statements (contact dichotomy
    inclusions, certificate thresholds).  Seeing one either means the
    tolerance constant was calibrated too small or the inputs are outside
    the regime the statement covers.
    """
