"""Exception types shared across the package.

Errors that oracle tests need to dissect carry structured payloads
(witness pairs, frontiers, iteration counts) rather than bare messages.
"""

from __future__ import annotations


class TreetopError(Exception):
    """Base class for all package errors."""


class DomainError(TreetopError):
    """A point is outside the domain of the system it was handed to."""


class NotRelatedError(TreetopError):
    """Two points do not lie in one orbit component within the search horizon."""


class BudgetError(TreetopError):
    """A declared exploration or iteration budget ran out."""


class PartialBallError(BudgetError):
    """Ball exploration hit its vertex budget.

    `partial` holds the ball explored so far; `frontier` the indices of the
    vertices whose neighborhoods were not expanded.
    """

    def __init__(self, message, partial, frontier):
        super().__init__(message)
        self.partial = partial
        self.frontier = frontier


class RecurrenceBudgetError(BudgetError):
    """A next-return / retraction search exhausted its iteration budget."""

    def __init__(self, message, examined):
        super().__init__(message)
        self.examined = examined


class StepBudgetError(BudgetError):
    """A random walk ran out of steps before its prefix stabilized."""

    def __init__(self, message, steps):
        super().__init__(message)
        self.steps = steps


class InvalidEdgeError(TreetopError):
    """An edge is not present in the tree it was used against."""


class CoherenceError(TreetopError):
    """A directed-edge set failed the coherence precondition.

    `witness` is a pair of directed edges whose terminus sides are disjoint.
    """

    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class ConvexityError(TreetopError):
    """A vertex set that had to be convex is not."""


class NoPathError(TreetopError):
    """No path exists from the source to the target set."""


class ColoringError(TreetopError):
    """An edge coloring is not proper, or misses an edge."""


class EmptyFamilyError(TreetopError):
    """An operation over a family of sets received the empty family."""


class InvalidSubtreeError(TreetopError):
    """A vertex set that had to induce a connected subgraph does not."""


class DisjointPairError(TreetopError):
    """Two members of a family that had to intersect are disjoint.

    `witness` holds the indices of the offending pair.
    """

    def __init__(self, message, witness):
        super().__init__(message)
        self.witness = witness


class PlanError(TreetopError):
    """An experiment plan document failed validation.

    `path` is a JSON-pointer-ish path to the offending field.
    """

    def __init__(self, message, path=""):
        super().__init__(message)
        self.path = path


class UnknownSystemError(PlanError):
    """A system descriptor names a type this package does not provide."""
