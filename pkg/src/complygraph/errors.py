"""Exception types shared across the package.

Parse errors carry a 1-based line number when one is known so CLI users can
locate the offending input line.
"""

from __future__ import annotations


class ComplyGraphError(Exception):
    """Base class for all errors raised by this package."""


class MalformedSource(ComplyGraphError):
    """Structural failure while parsing an input file."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DuplicateArticle(ComplyGraphError):
    """The same article number appears more than once in a regulation."""


class EmptyDocument(ComplyGraphError):
    """A regulation source parsed to zero chapters."""


class UnknownArticle(ComplyGraphError):
    """Reference to an article number that does not exist."""


class UnknownRole(ComplyGraphError):
    """Obligation role name outside the closed five-role set."""


class DuplicateProvider(ComplyGraphError):
    """The same provider id appears more than once in a policy corpus."""


class EmptySegment(ComplyGraphError):
    """A policy segment has no text."""


class UnknownSegment(ComplyGraphError):
    """Ground-truth row referencing a segment that was never ingested."""


class NonGroundTriple(ComplyGraphError):
    """Attempt to store a triple that still contains a variable."""


class TurtleSyntax(ComplyGraphError):
    """Syntax error in a Turtle document."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EmptyCorpus(ComplyGraphError):
    """Index build requested over zero chunks."""


class EmptyRoleSet(ComplyGraphError):
    """Builtin rule construction requested for zero roles."""


class BackendUnavailable(ComplyGraphError):
    """External generation service failed or timed out."""


class UpstreamEmptyPolicy(ComplyGraphError):
    """A policy document reached the mapper with no segments left."""


class UnknownProvider(ComplyGraphError):
    """Reference to a provider that is not present in the graph."""


class IterationCap(ComplyGraphError):
    """Forward chaining exceeded its defensive round limit."""


class NoOverlap(ComplyGraphError):
    """Predictions and ground truth share no segments."""
