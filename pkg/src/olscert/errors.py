"""Exception hierarchy shared by every module."""


class OlsCertError(Exception):
    """Base class for all package errors."""


class RankDeficient(OlsCertError, ArithmeticError):
    """A matrix failed the full-column-rank tolerance check."""


class DimensionMismatch(OlsCertError, ValueError):
    pass


class NoCandidate(OlsCertError):
    """Every remaining column (or block) lies numerically in the selected span."""


class InvalidConfig(OlsCertError, ValueError):
    pass


class InvalidState(OlsCertError, ValueError):
    pass


class DomainError(OlsCertError, ValueError):
    """A guarantee formula was evaluated outside its validity region.

    ``value`` carries the offending intermediate quantity when there is one,
    so callers can see how far outside the region they are.
    """

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class InconsistentRoots(OlsCertError, ArithmeticError):
    """Closed-form and bisection thresholds disagree beyond tolerance."""
