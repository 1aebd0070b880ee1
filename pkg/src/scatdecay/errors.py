"""Exception types shared across the package."""


class OrderOverflowError(ValueError):
    """Requested multipole order exceeds the configured maximum."""


class PochhammerPoleError(ZeroDivisionError):
    """Extended Pochhammer symbol hit a pole (division by zero)."""


class DegenerateDenominatorError(ArithmeticError):
    """Mie denominator underflowed: a resonance pole was hit exactly."""


class RecursionTerminationError(ZeroDivisionError):
    """Three-term integral recursion reached its terminating order."""


class UnsupportedExponentError(ValueError):
    """No closed form is implemented for this power of the integrand."""


class ConvergenceError(RuntimeError):
    """A sum or quadrature failed to reach the requested tolerance."""


class HalfspaceDivergenceError(ConvergenceError):
    """The requested halfspace integral diverges (no finite limit exists)."""


class ColdInputError(ValueError):
    """Operation requires a finite temperature but got the cold limit."""


class ConvergenceWarning(UserWarning):
    """Truncated sum whose tail estimate exceeds the requested tolerance."""
