"""Exception types raised across mtlab.

Every concrete error also subclasses the builtin it refines, so callers that
only know about ``ValueError``/``RuntimeError`` keep working.
"""

from __future__ import annotations

from typing import Optional


class MtlabError(Exception):
    """Base class for all mtlab errors."""


class InvalidPrimeError(MtlabError, ValueError):
    """A prime argument is not prime, too large to enumerate, or of the wrong reduction type."""


class CurveDataError(MtlabError, ValueError):
    """Malformed or inconsistent curve data."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(f"{where}{message}")


class LevelTooLargeError(MtlabError, ValueError):
    pass


class GroupTooLargeError(MtlabError, ValueError):
    pass


class EigenspaceIsolationError(MtlabError, RuntimeError):
    """The Hecke eigenspaces never became one-dimensional."""


class NormalizationError(MtlabError, RuntimeError):
    """The numeric reconciliation constant is not a small-height rational."""


class PrecisionError(MtlabError, RuntimeError):
    pass


class MembershipError(MtlabError, ValueError):
    pass


class SupportMismatchError(MtlabError, ValueError):
    pass


class SubgroupError(MtlabError, ValueError):
    pass


class MissingGeneratorsError(MtlabError, ValueError):
    pass


class FiltrationConsistencyError(MtlabError, RuntimeError):
    """Two independent membership computations disagree."""
