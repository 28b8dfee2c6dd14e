"""Exception hierarchy shared by the library and the CLI."""


class LaguerreError(ValueError):
    """Base class for every error raised by this package."""


class DomainError(LaguerreError):
    """A parameter lies outside the range of its function or operator."""


class PoleError(DomainError):
    """Gamma evaluated at a non-positive integer."""


class ArgumentBoundError(DomainError):
    """Series argument exceeds the evaluation policy's bound."""


class BalanceError(DomainError):
    """An ansatz cannot balance the equation it was built for."""


class SeriesInvariantError(LaguerreError):
    """A PhasedPowerSeries invariant would be violated."""


class GridError(LaguerreError):
    """Grid or sample layout does not meet an operator's preconditions."""


class MaskError(LaguerreError):
    """Too many nodes masked, or a required sample node is masked."""


class NotAffineError(LaguerreError):
    """Residual is not affine in the temporal eigenvalue r."""


class ConfigError(LaguerreError):
    """A run configuration file is missing or unreadable."""


class ConvergenceError(DomainError):
    """A series did not meet its stopping criterion within max_terms."""
