"""Exception types shared across the package.

Two failure families matter to callers: bad inputs (caller error, CLI exit
code 2) and computations that are well-posed but exceed a resource or
validity limit (CLI exit code 3).
"""

from __future__ import annotations


class UsageError(ValueError):
    """Invalid argument, option, or configuration value."""


class DegenerateMomentError(UsageError):
    """Second-moment constants requested where the defining system is singular.

    The pair-delta expansion has a vanishing denominator whenever either
    dimension equals 1; the rank-one special case must be used instead.
    """


class FeasibilityError(RuntimeError):
    """Requested computation exceeds a resource bound or numeric range."""
