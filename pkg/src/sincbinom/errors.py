"""Exception hierarchy shared by every module in the package."""


class SincBinomError(Exception):
    """Base class for library errors."""


class DomainError(SincBinomError, ValueError):
    """An argument lies outside the region where an operation is defined."""


class PoleError(DomainError):
    """The argument sits on a pole of the gamma function."""


class NoConvergence(SincBinomError, ArithmeticError):
    """A series or quadrature exhausted its budget before reaching tolerance.

    The best available result is attached as ``evaluation`` so callers can
    still inspect the partial answer.
    """

    def __init__(self, message, evaluation=None):
        super().__init__(message)
        self.evaluation = evaluation


class DivergentTail(SincBinomError, ArithmeticError):
    """The integrand tail does not decay the way the caller declared."""
