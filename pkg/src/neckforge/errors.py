"""Exception hierarchy shared by every module."""


class NeckforgeError(Exception):
    """Base class for all library errors."""


class DomainError(NeckforgeError, ValueError):
    """An argument lies outside the domain of the function."""


class NonIntegrableSingularity(NeckforgeError, ValueError):
    pass


class NonIntegrable(NonIntegrableSingularity):
    """Sampled integrand grows too fast at an endpoint."""


class NoConvergence(NeckforgeError, RuntimeError):
    pass


class InvalidMatching(NeckforgeError, ValueError):
    """Matching point sits below the horn tip value."""


class NonMonotone(NeckforgeError, RuntimeError):
    """A discrete harmonic function broke monotonicity beyond noise."""


class IllConditioned(NeckforgeError, RuntimeError):
    pass


class CutoffOutsideNeck(NeckforgeError, ValueError):
    pass


class NoRoot(NeckforgeError, RuntimeError):
    pass


class InvalidRegionOrder(NeckforgeError, ValueError):
    pass


class ConvexityLoss(NeckforgeError, RuntimeError):
    """A potential lost strict convexity; ``where`` holds the location."""

    def __init__(self, message, where=None):
        super().__init__(message)
        self.where = where


class NoContraction(NeckforgeError, RuntimeError):
    def __init__(self, message, residuals=()):
        super().__init__(message)
        self.residuals = tuple(residuals)


class NoSignChange(NeckforgeError, RuntimeError):
    def __init__(self, message, lam_lo=None, lam_hi=None):
        super().__init__(message)
        self.lam_lo = lam_lo
        self.lam_hi = lam_hi


class DegeneratePoint(NeckforgeError, ValueError):
    pass


class NewtonDiverged(NeckforgeError, RuntimeError):
    pass


class ConfigError(NeckforgeError, ValueError):
    """Bad or unknown configuration key/value."""
