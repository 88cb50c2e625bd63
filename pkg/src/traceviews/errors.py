"""Exception types raised by the compiler stages."""

from __future__ import annotations


class TraceviewsError(Exception):
    """Base class for every error this package raises on purpose."""


class StrictModeError(TraceviewsError):
    """An error-severity diagnostic was produced while running in strict mode."""

    def __init__(self, message: str, diagnostics=()):
        super().__init__(message)
        self.diagnostics = list(diagnostics)


class LineAssignmentError(TraceviewsError):
    pass


class UnassignedDocumentError(TraceviewsError):
    pass


class SpanError(TraceviewsError, ValueError):
    """Malformed or out-of-bounds line span."""


class PredicateError(TraceviewsError, ValueError):
    pass
