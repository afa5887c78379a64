"""Exception types raised across the package."""


class InvalidArgumentError(ValueError):
    """An argument violates an operation's precondition."""


class OutOfModelError(ValueError):
    """The requested target lies outside the validity of the signal model."""


class EstimationError(RuntimeError):
    """An estimator could not produce a result (degenerate input)."""


class NumericalError(ArithmeticError):
    """A linear-algebra step failed (singular or non-finite matrix)."""


class ScenarioInfeasibleError(RuntimeError):
    """No admissible trajectory was found within the resampling budget."""
