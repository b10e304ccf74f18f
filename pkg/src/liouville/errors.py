"""Exception types shared across the package."""


class LiouvilleError(ValueError):
    """Base class for domain errors raised by this package."""


class PoleError(LiouvilleError):
    """A meromorphic function was evaluated at (or numerically on) a pole.

    ``location`` holds the offending argument so callers can report it.
    """

    def __init__(self, message, location=None):
        super().__init__(message)
        self.location = location


class ConditionError(LiouvilleError):
    """Parameters violate an existence condition (Seiberg bounds, channel conditions...)."""


class NotPositiveDefiniteError(LiouvilleError, ArithmeticError):
    """A Gram matrix expected to be positive definite failed Cholesky factorisation."""


class DivergenceWarning(RuntimeWarning):
    """A truncated series looks divergent at the requested point."""
