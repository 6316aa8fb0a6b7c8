class RealHomError(Exception):
    """Base class for errors raised by realhom."""


class InvalidSystemError(RealHomError, ValueError):
    """Malformed or unsupported polynomial system."""


class InvalidInputError(RealHomError, ValueError):
    """A covering, complex or other stage input fails validation."""


class NewtonUndefined(RealHomError, ArithmeticError):
    """The Jacobian is rank deficient, so the Moore-Penrose step does not exist."""


class NewtonDiverged(RealHomError, ArithmeticError):
    """Newton iteration failed to reach the requested residual."""


class BudgetExceeded(RealHomError):
    """A configured resource budget ran out before the computation finished.

    Attributes
    ----------
    eta : float or None
        Last mesh tried by the covering loop.
    refine_count : int
        Points left undecided in the last scanned pass.
    """

    def __init__(self, message, eta=None, refine_count=0, count=None):
        super().__init__(message)
        self.eta = eta
        self.refine_count = refine_count
        self.count = count


class InvariantViolation(RealHomError, AssertionError):
    """A runtime consistency check failed (certificate contradiction)."""
