"""Exception hierarchy shared across the package.

Exit-code mapping used by the CLI: InputError and subclasses -> 1,
InvariantError -> 2.  Everything else is a plain bug and propagates.
"""

from __future__ import annotations


class CollodbError(Exception):
    """Base class for all errors raised by this package."""


class InputError(CollodbError):
    """Bad user-supplied data: files, config values, CLI arguments."""


class ParseError(InputError):
    """Malformed input file; carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ValidationError(InputError):
    """Structurally invalid data (bad tree, bad vector, bad record)."""


class ConfigError(InputError):
    """Invalid configuration key or value."""


class InvariantError(CollodbError):
    """An internal consistency check failed; indicates a bug, not bad input."""
