"""Exception hierarchy shared across the toolkit."""

from __future__ import annotations


class CqfError(Exception):
    """Base class for all domain errors."""


class SchemaParseError(CqfError):
    """Raised for malformed `.cqs` input; carries line/column positions."""

    def __init__(self, line: int, column: int, message: str):
        self.line = line
        self.column = column
        self.message = message
        super().__init__(f"line {line}, column {column}: {message}")


class UnknownObjectTypeError(CqfError):
    pass


class UnknownFactTypeError(CqfError):
    pass


class InvalidPathError(CqfError):
    pass


class NoPathError(CqfError):
    """No simple path exists between a required point pair."""

    def __init__(self, source: str, target: str):
        self.source = source
        self.target = target
        super().__init__(f"no path connects ({source}, {target})")


class BadIndexError(CqfError):
    """An index or index path addresses nothing."""


class IllegalMoveError(CqfError):
    pass


class TypingError(CqfError):
    """A query expression violates the head/tail type discipline."""


class SpliceError(CqfError):
    pass


class UnresolvedPlaceholderError(CqfError):
    pass


class QueryTextError(CqfError):
    """Malformed query expression text."""


class PopulationError(CqfError):
    """Raised for malformed `.cqp` input."""

    def __init__(self, line: int, message: str):
        self.line = line
        self.message = message
        super().__init__(f"line {line}: {message}")


class IdentifierCollisionError(CqfError):
    pass


class SqlUnsupportedError(CqfError):
    """The expression has no SQL lowering in this dialect subset."""
