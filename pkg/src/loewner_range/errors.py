"""Exception hierarchy shared by the solvers, region builders and integrators."""


class LoewnerRangeError(Exception):
    """Base class for every error raised by this package."""


class DomainError(LoewnerRangeError, ValueError):
    """An argument lies outside the domain of the formula."""


class NumericalFailure(LoewnerRangeError, RuntimeError):
    """A solver failed to bracket or converge. For valid inputs this is a bug."""


class NoRoot(NumericalFailure):
    """The inverse radius equation has no root below 1 (x0 = 1 with T >= T*)."""


class RootNearOne(NumericalFailure):
    """The inverse radius root lies closer to 1 than double precision resolves.

    ``estimate`` is ``1 - near_one``, a lower bound for the true root.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class Unsupported(LoewnerRangeError):
    """Curve geometry outside the two-crossing picture (sigma exceeds 2*pi)."""


class StepUnderflow(NumericalFailure):
    """An adaptive integration step fell below the minimum step size."""
