"""Exception types raised across the package."""


class NonPositiveInput(ValueError):
    """A coordinate was zero, negative, NaN or infinite."""


class HypothesisViolated(ValueError):
    """A checker was called outside the range where its inequality is claimed."""


class PrecisionExhausted(ArithmeticError):
    """Extended precision could not separate a margin from the tolerance band."""


class DegenerateGamma(ArithmeticError):
    """The Case 2 exponent gamma vanished or pushed coordinates out of budget."""


class BudgetExhausted(RuntimeError):
    """A search ran out of evaluations; ``outcome`` holds the best point so far."""

    def __init__(self, message, outcome=None):
        super().__init__(message)
        self.outcome = outcome


class BracketInvalid(RuntimeError):
    """Threshold bisection could not establish a valid starting bracket."""
