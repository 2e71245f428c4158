"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: hypothesis violations exit with 2,
budget overruns with 3, parse failures with 4.
"""


class FreenormError(Exception):
    """Base class for all package-specific errors."""


class ContextMismatchError(FreenormError):
    """Two operands belong to different group contexts."""


class HypothesisViolationError(FreenormError):
    """An operation's mathematical precondition does not hold.

    Raised instead of silently computing something the underlying statement
    does not cover (zero exponents, identity inputs, oversized conjugating
    words, and so on).
    """


class BudgetExceededError(FreenormError):
    """A computation would exceed the configured term/memory budget."""

    def __init__(self, message: str, predicted: int | None = None, budget: int | None = None):
        super().__init__(message)
        self.predicted = predicted
        self.budget = budget


class CoefficientLimitError(BudgetExceededError):
    """A coefficient grew past the configured bit-length cap."""


class ParseError(FreenormError):
    """Malformed textual input; carries the offending position."""

    def __init__(self, message: str, text: str = "", position: int | None = None):
        if position is not None:
            message = f"{message} (at position {position}: ...{text[position:position + 12]!r})"
        super().__init__(message)
        self.text = text
        self.position = position
