"""Exception types shared across the toolkit."""


class KisspolyError(Exception):
    """Base class for all toolkit errors."""


class ValidationError(KisspolyError):
    """A precondition on user-supplied input was violated."""


class NumericalError(KisspolyError):
    """A numerical procedure failed to converge or lost too much accuracy."""


class NonConvergenceError(NumericalError):
    """Adaptive integration ran out of subdivisions.

    Carries the worst offending subinterval so callers can diagnose
    which part of the contour is problematic.
    """

    def __init__(self, message, worst_interval=None, error_estimate=None):
        super().__init__(message)
        self.worst_interval = worst_interval
        self.error_estimate = error_estimate


class BranchAmbiguityError(NumericalError):
    """A branch continuation passed too close to a zero or pole."""


class PathBlockedError(KisspolyError):
    """No admissible corridor between the requested endpoints."""


class ExistenceError(NumericalError):
    """The defining linear system of a polynomial is numerically singular.

    The conditioning diagnostic of the system is attached so callers can
    distinguish honest degeneration from an overly strict threshold.
    """

    def __init__(self, message, cond=None):
        super().__init__(message)
        self.cond = cond


class ThetaStarError(NumericalError):
    """2*kappa - c is too close to 2*pi*Z: the odd-degree model problem degenerates."""

    def __init__(self, message, proximity=None, lam=None):
        super().__init__(message)
        self.proximity = proximity
        self.lam = lam
