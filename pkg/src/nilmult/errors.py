"""Exception types shared across the toolkit.

Exit-code mapping for the CLI lives in ``nilmult.cli``; library code raises
these and never calls ``sys.exit``.
"""

from __future__ import annotations


class NilmultError(Exception):
    """Base class for all package-specific errors."""


class FormatError(NilmultError):
    """Malformed JSON input: wrong shape, unknown keys, bad values."""


class ParseError(NilmultError):
    """Word-grammar parse failure with position and expectation info."""

    def __init__(self, message: str, position: int, expected: tuple[str, ...] = ()):
        super().__init__(f"{message} at offset {position}")
        self.position = position
        self.expected = expected


class ResourceCapError(NilmultError):
    """A configured size cap (basis size, group order, term count) was exceeded."""


class ContextMismatch(NilmultError):
    """Operands live in different free nilpotent group contexts."""


class NotReduced(NilmultError):
    """A reduced simplicial set (singleton in dimension 0) was required."""


class OutOfTruncationRange(NilmultError):
    """A homotopy degree was requested beyond what the truncation supports."""


class Unstabilized(NilmultError):
    """A directed system did not become eventually constant within the window."""


class HypothesisFailed(NilmultError):
    """A theorem's hypotheses fail; carries the named failing witnesses."""

    def __init__(self, witnesses: dict):
        names = ", ".join(sorted(witnesses))
        super().__init__(f"hypothesis failed: {names}")
        self.witnesses = witnesses


class MissingData(NilmultError):
    """A required field of a group datum is absent and not computable."""

    def __init__(self, field: str):
        super().__init__(f"missing data: {field}")
        self.field = field


class UnsupportedComputation(NilmultError):
    """No algorithm is available for the requested input class."""


class InvalidGroupDatum(NilmultError):
    """A group datum's fields are mutually inconsistent."""
