"""Exception types shared across the package."""

from __future__ import annotations


class MovepolyError(Exception):
    """Base class for all errors raised by this package."""


class DimensionMismatchError(MovepolyError):
    """Array shapes disagree with the declared dimensions."""


class ProblemFormatError(MovepolyError):
    """A problem description failed validation.

    ``path`` points at the offending field, e.g. ``constraints[2].A``.
    """

    def __init__(self, message: str, path: str = ""):
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class DependentFamilyError(MovepolyError):
    """Vectors required to be independent turned out dependent."""


class InfeasibleSetError(MovepolyError):
    """The constraint system has no solution at the given parameter."""


class ReductionError(MovepolyError):
    """A multiplier reduction violated one of its invariants."""


class SolverLimitError(MovepolyError):
    """An iterative solver hit its iteration cap."""


class EnumerationGuardError(MovepolyError):
    """A combinatorial enumeration would exceed its size guard."""


class SamplingDiagnosticError(MovepolyError):
    """A sampled estimate retained no usable samples."""
