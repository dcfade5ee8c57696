"""Exception taxonomy shared across the package.

Parsing and validation failures subclass ``SurveyScopeError`` so callers
(CLI, HTTP service) can map them to exit codes / status codes in one place.
"""

from __future__ import annotations


class SurveyScopeError(Exception):
    """Base class for all errors raised by this package."""


class EmptyInput(SurveyScopeError):
    """The uploaded file contains no data rows."""


class UnparsableCsv(SurveyScopeError):
    """The byte stream does not look like CSV at all."""


class MalformedLine(SurveyScopeError):
    """A JSONL line failed to parse (fatal only when every line fails)."""

    def __init__(self, line_no: int, reason: str = ""):
        self.line_no = line_no
        super().__init__(f"line {line_no}: {reason}" if reason else f"line {line_no}")


class UnknownColumn(SurveyScopeError):
    """A referenced column does not exist in the table."""


class NonCategoricalFilter(SurveyScopeError):
    """A filter constrains a column that is not categorical."""


class NonCategoricalColumn(SurveyScopeError):
    """A grouping column is not categorical."""


class NonOpenEndedQuestion(SurveyScopeError):
    """Analysis was requested for a column that is not open-ended."""


class ProviderUnavailable(SurveyScopeError):
    """A remote provider failed after exhausting retries."""


class DimensionMismatch(SurveyScopeError):
    """An embedding provider returned vectors of the wrong shape."""


class EmptyResponseSet(SurveyScopeError):
    """An operation that needs at least one response got none."""


class DomainError(SurveyScopeError):
    """Numeric arguments violate an operation's preconditions."""


class UnparsableCompletion(SurveyScopeError):
    """An LM completion did not match the requested output format."""
