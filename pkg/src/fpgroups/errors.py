"""Exception taxonomy shared across the toolkit.

The CLI maps these onto its exit-code contract: parse errors exit 2,
validation errors 3, budget errors 4, failed checks 5.
"""

from __future__ import annotations


class ToolkitError(Exception):
    """Base class for everything raised on purpose by this package."""


class WordSyntaxError(ToolkitError):
    """Malformed word or presentation text; carries the offending position."""

    def __init__(self, message: str, pos: int | None = None):
        self.pos = pos
        if pos is not None:
            message = f"{message} (at position {pos})"
        super().__init__(message)


class AlphabetMismatchError(ToolkitError):
    """A letter or name that does not belong to the expected alphabet."""


class ValidationError(ToolkitError):
    """Structurally invalid input: bad presentation, bad subgroup spec, ..."""


class NameCollisionError(ValidationError):
    """A constructor was asked to add a generator name that already exists."""


class BudgetExceededError(ToolkitError):
    """A configured budget (word length, cells, states) was exhausted.

    ``partial`` optionally carries whatever was computed before the abort.
    """

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


class CheckFailedError(ToolkitError):
    """A verification (relator check, metric condition) did not hold."""
