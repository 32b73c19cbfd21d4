"""Exception types raised across the package."""


class BayesRSError(Exception):
    """Base class for all package errors."""


class NotPositiveDefinite(BayesRSError, ValueError):
    pass


class SingularCovariance(NotPositiveDefinite):
    """An estimated covariance block could not be factorized."""


class DegenerateDF(BayesRSError, ValueError):
    """A degrees-of-freedom correction ``n_i - i + nu0`` fell below one."""


class InvalidParameter(BayesRSError, ValueError):
    pass


class DimensionMismatch(BayesRSError, ValueError):
    pass


class InitialSampleTooSmall(BayesRSError, ValueError):
    pass


class OutOfRange(BayesRSError, IndexError):
    pass


class InvalidScheme(BayesRSError, ValueError):
    pass


class BudgetTooSmall(BayesRSError, ValueError):
    pass


class GenerationFailed(BayesRSError, RuntimeError):
    pass


class NonPositiveScaleWarning(RuntimeWarning):
    """A pairwise posterior variance was <= 0 and has been clamped."""
