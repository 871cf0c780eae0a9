"""Exception hierarchy shared by every module."""


class Raman3DError(Exception):
    """Base class for all errors raised by raman3d."""


class DomainError(Raman3DError, ValueError):
    """An input lies outside the domain where the model is valid."""


class ConvergenceError(Raman3DError, ArithmeticError):
    """Adaptive quadrature exhausted its subdivision budget.

    The best available value and error estimate are kept on the exception so
    callers can decide whether the partial result is still usable.
    """

    def __init__(self, message, value=float("nan"), error_estimate=float("inf"), evaluations=0):
        super().__init__(message)
        self.value = value
        self.error_estimate = error_estimate
        self.evaluations = evaluations


class NumericalInstability(Raman3DError, ArithmeticError):
    """A quantity that must be non-negative came out negative beyond its error bar."""


class NoSolution(Raman3DError, ValueError):
    """An optimisation target cannot be reached inside the admissible range."""


class ReproductionMismatch(Raman3DError):
    """Computed values disagree with reference anchors beyond tolerance."""

    def __init__(self, message, offending=()):
        super().__init__(message)
        self.offending = list(offending)


class ConfigError(Raman3DError, ValueError):
    """A configuration document is malformed or inconsistent."""
