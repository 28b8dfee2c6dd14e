"""Temporal eigenfunctions f with T[f] = -r f for each supported time operator T."""

import math
from enum import StrEnum

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import DomainError
from .fracpoly import PhasedPowerSeries, caputo, differentiate, hyper_bessel_op, laguerre_derivative
from .numops import FloatArray, Grid1D, caputo_l1, fd_derivative, hyper_bessel_fd, laguerre_time_fd
from .specfun import (
    DEFAULT_POLICY,
    SeriesEvalPolicy,
    hyper_bessel_w,
    hyper_bessel_w_coefficient,
    mittag_leffler,
    power_over_gamma,
    tricomi_c0,
)


class TimeOperator(StrEnum):
    """Time operators T appearing as the first term of the catalog equations."""

    DERIVATIVE = "derivative"  # d/dt
    LAGUERRE = "laguerre"  # minus the Laguerre derivative, d/dt t d/dt
    CAPUTO = "caputo"  # Caputo derivative of order alpha
    HYPER_BESSEL = "hyper-bessel"  # t^{alpha-nu} D^beta t^nu D^alpha


class ProfileKind(StrEnum):
    EXPONENTIAL = "exponential"
    TRICOMI = "tricomi"
    MITTAG_LEFFLER = "mittag-leffler"
    HYPER_BESSEL_W = "hyper-bessel-w"


PROFILE_FOR_OPERATOR = {
    TimeOperator.DERIVATIVE: ProfileKind.EXPONENTIAL,
    TimeOperator.LAGUERRE: ProfileKind.TRICOMI,
    TimeOperator.CAPUTO: ProfileKind.MITTAG_LEFFLER,
    TimeOperator.HYPER_BESSEL: ProfileKind.HYPER_BESSEL_W,
}
OPERATOR_FOR_PROFILE = {kind: op for op, kind in PROFILE_FOR_OPERATOR.items()}


def check_operator_params(op: TimeOperator, alpha: float, beta: float, nu: float) -> None:
    if op in (TimeOperator.CAPUTO, TimeOperator.HYPER_BESSEL) and not 0.0 < alpha <= 1.0:
        raise DomainError(f"alpha must lie in (0, 1], got {alpha:g}")
    if op is TimeOperator.HYPER_BESSEL:
        if not 0.0 < beta <= 1.0:
            raise DomainError(f"beta must lie in (0, 1], got {beta:g}")
        if nu <= 0.0:
            raise DomainError(f"nu must be positive, got {nu:g}")


def is_fractional(op: TimeOperator, alpha: float, beta: float) -> bool:
    """True when the fd evaluation of op goes through the L1 scheme."""
    if op is TimeOperator.CAPUTO:
        return alpha < 1.0
    if op is TimeOperator.HYPER_BESSEL:
        return alpha < 1.0 or beta < 1.0
    return False


def apply_time_operator_fd(
    op: TimeOperator,
    samples: ArrayLike,
    t_grid: Grid1D,
    alpha: float = 1.0,
    beta: float = 1.0,
    nu: float = 1.0,
    axis: int = -1,
) -> FloatArray:
    """Numerical T[samples] along axis; invalid nodes are NaN."""
    match op:
        case TimeOperator.DERIVATIVE:
            return fd_derivative(samples, t_grid.h, 1, axis)
        case TimeOperator.LAGUERRE:
            return -laguerre_time_fd(samples, t_grid, axis)
        case TimeOperator.CAPUTO:
            if alpha == 1.0:
                return fd_derivative(samples, t_grid.h, 1, axis)
            return caputo_l1(samples, t_grid, alpha, axis)
        case TimeOperator.HYPER_BESSEL:
            return hyper_bessel_fd(samples, t_grid, alpha, beta, nu, axis)


def apply_time_operator_series(
    op: TimeOperator, s: PhasedPowerSeries, alpha: float = 1.0, beta: float = 1.0, nu: float = 1.0
) -> PhasedPowerSeries:
    """Exact T[s] on a series in t."""
    match op:
        case TimeOperator.DERIVATIVE:
            return differentiate(s)
        case TimeOperator.LAGUERRE:
            return -laguerre_derivative(s)
        case TimeOperator.CAPUTO:
            return caputo(s, alpha)
        case TimeOperator.HYPER_BESSEL:
            return hyper_bessel_op(s, alpha, beta, nu)


class TemporalProfile(BaseModel):
    """f(t) with T[f] = -r f for the time operator paired with kind."""

    model_config = ConfigDict(frozen=True)

    kind: ProfileKind
    r: float = Field(gt=0.0)
    alpha: float = 1.0
    beta: float = 1.0
    nu: float = 1.0

    @model_validator(mode="after")
    def check_params(self) -> "TemporalProfile":
        check_operator_params(self.operator, self.alpha, self.beta, self.nu)
        return self

    @property
    def operator(self) -> TimeOperator:
        return OPERATOR_FOR_PROFILE[self.kind]

    @property
    def fractional(self) -> bool:
        return is_fractional(self.operator, self.alpha, self.beta)

    def describe(self) -> str:
        match self.kind:
            case ProfileKind.EXPONENTIAL:
                return f"exp(-{self.r:g} t)"
            case ProfileKind.TRICOMI:
                return f"C0({self.r:g} t)"
            case ProfileKind.MITTAG_LEFFLER:
                return f"E_{self.alpha:g}(-{self.r:g} t^{self.alpha:g})"
            case ProfileKind.HYPER_BESSEL_W:
                return f"W_{self.alpha:g},{self.beta:g},{self.nu:g}(-{self.r:g} t^{self.beta:g})"

    def value(self, t: float, policy: SeriesEvalPolicy = DEFAULT_POLICY) -> float:
        if t < 0.0:
            raise DomainError(f"temporal profiles are defined for t >= 0, got t = {t:g}")
        match self.kind:
            case ProfileKind.EXPONENTIAL:
                return math.exp(-self.r * t)
            case ProfileKind.TRICOMI:
                return tricomi_c0(self.r * t, policy)
            case ProfileKind.MITTAG_LEFFLER:
                return mittag_leffler(self.alpha, -self.r * t**self.alpha, policy)
            case ProfileKind.HYPER_BESSEL_W:
                return hyper_bessel_w(self.alpha, self.beta, self.nu, -self.r * t**self.beta, policy)

    def sample(self, t: ArrayLike, policy: SeriesEvalPolicy = DEFAULT_POLICY) -> FloatArray:
        points = np.asarray(t, dtype=np.float64)
        return np.array([self.value(float(p), policy) for p in points.reshape(-1)]).reshape(points.shape)

    def series(self, n_terms: int) -> PhasedPowerSeries:
        """First n_terms of f as a generalized power series in t."""
        k = np.arange(n_terms)
        match self.kind:
            case ProfileKind.EXPONENTIAL:
                coeffs = [power_over_gamma(-self.r, int(j), j + 1.0) for j in k]
                exponents = k.astype(np.float64)
            case ProfileKind.TRICOMI:
                coeffs = [power_over_gamma(-self.r, int(j), j + 1.0) / math.factorial(int(j)) for j in k]
                exponents = k.astype(np.float64)
            case ProfileKind.MITTAG_LEFFLER:
                coeffs = [power_over_gamma(-self.r, int(j), self.alpha * j + 1.0) for j in k]
                exponents = self.alpha * k
            case ProfileKind.HYPER_BESSEL_W:
                coeffs = [
                    hyper_bessel_w_coefficient(int(j), self.alpha, self.beta, self.nu) * (-self.r) ** int(j) for j in k
                ]
                exponents = self.beta * k
        return PhasedPowerSeries(np.array(coeffs, dtype=np.complex128), np.asarray(exponents, dtype=np.float64))

    def apply_operator_series(self, s: PhasedPowerSeries) -> PhasedPowerSeries:
        return apply_time_operator_series(self.operator, s, self.alpha, self.beta, self.nu)

    def apply_operator_fd(self, samples: ArrayLike, t_grid: Grid1D, axis: int = -1) -> FloatArray:
        return apply_time_operator_fd(self.operator, samples, t_grid, self.alpha, self.beta, self.nu, axis)
