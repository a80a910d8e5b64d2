"""Exception types raised across the package."""


class ParameterError(ValueError):
    """Invalid or inconsistent parameters."""


class SignalEvaluationError(ArithmeticError):
    """A signal produced a non-finite value during sampling."""


class MissedCrossingError(RuntimeError):
    """Sampling at the configured step missed or misplaced a threshold crossing."""
