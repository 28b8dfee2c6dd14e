"""Catalog of Burgers-like and KdV-like equations with separable exact solutions.

Every entry is solved by u(x, t) = R e^{kx} f(t) where f is an eigenfunction
of the equation's time operator, T[f] = -r f, and r is fixed by k through the
family's dispersion relation.
"""

from enum import StrEnum
from typing import Any

import numpy as np
from numpy.typing import ArrayLike
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import BalanceError, DomainError
from .logging_config import get_logger
from .numops import FloatArray, Grid1D, SampledField
from .profiles import PROFILE_FOR_OPERATOR, TemporalProfile, TimeOperator, check_operator_params
from .specfun import DEFAULT_POLICY, SeriesEvalPolicy

logger = get_logger(__name__)


class Family(StrEnum):
    BURGERS_CLASSIC = "burgers-classic"
    BURGERS_LAGUERRE = "burgers-laguerre"
    BURGERS_GENERAL_OT = "burgers-general"
    BURGERS_FRACTIONAL = "burgers-fractional"
    BURGERS_HYPER_BESSEL = "burgers-hyper-bessel"
    BURGERS_POWER_N = "burgers-power-n"
    BURGERS_HIGH_ORDER = "burgers-high-order"
    KDV_LAGUERRE = "kdv-laguerre"
    KDV_GENERAL_OT = "kdv-general"
    VAR_COEF_BURGERS = "varcoef-burgers"
    VAR_COEF_GENERAL_OT = "varcoef-general"


class ParseMode(StrEnum):
    """Reading of the power-n nonlinearity: (2u_x/u)^n u_x or 2(u_x/u)^n u_x."""

    LITERAL = "literal"
    PAPER_CONDITION = "paper_condition"


# Families whose time operator is part of their definition
FIXED_TIME_OPERATOR: dict[Family, TimeOperator] = {
    Family.BURGERS_CLASSIC: TimeOperator.DERIVATIVE,
    Family.BURGERS_LAGUERRE: TimeOperator.LAGUERRE,
    Family.BURGERS_FRACTIONAL: TimeOperator.CAPUTO,
    Family.BURGERS_HYPER_BESSEL: TimeOperator.HYPER_BESSEL,
    Family.BURGERS_POWER_N: TimeOperator.LAGUERRE,
    Family.KDV_LAGUERRE: TimeOperator.LAGUERRE,
    Family.VAR_COEF_BURGERS: TimeOperator.LAGUERRE,
}

KDV_FAMILIES = frozenset({Family.KDV_LAGUERRE, Family.KDV_GENERAL_OT})
VAR_COEF_FAMILIES = frozenset({Family.VAR_COEF_BURGERS, Family.VAR_COEF_GENERAL_OT})
THIRD_ORDER_FAMILIES = KDV_FAMILIES | {Family.BURGERS_HIGH_ORDER}


class EquationSpec(BaseModel):
    """One catalog entry with its parameters.

    time_operator is only settable for the general families (and the
    high-order family); elsewhere it is implied by the family.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    family: Family
    time_operator: TimeOperator | None = None
    alpha: float = 0.5
    beta: float = 0.5
    nu: float = 1.0
    n: int = 2
    parse_mode: ParseMode = ParseMode.LITERAL
    k: float | None = None
    r: float | None = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def check_params(self) -> "EquationSpec":
        fixed = FIXED_TIME_OPERATOR.get(self.family)
        if fixed is not None and self.time_operator not in (None, fixed):
            raise DomainError(f"{self.family} uses the {fixed} time operator, got {self.time_operator}")
        if self.family is Family.BURGERS_POWER_N and self.n < 2:
            raise DomainError(f"power-n family requires n >= 2, got {self.n}")
        if self.family in VAR_COEF_FAMILIES:
            if self.k is None or self.k == 0.0:
                raise DomainError(f"{self.family} needs a non-zero wave number k in a(x) = k exp(-kx)")
            if self.r is None:
                raise DomainError(f"{self.family} needs the eigenvalue r of b(t)")
        check_operator_params(self.operator, self.alpha, self.beta, self.nu)
        return self

    @property
    def operator(self) -> TimeOperator:
        """Resolved time operator; Caputo of order 1 is the plain derivative."""
        op = FIXED_TIME_OPERATOR.get(self.family) or self.time_operator or TimeOperator.LAGUERRE
        if op is TimeOperator.CAPUTO and self.alpha == 1.0:
            return TimeOperator.DERIVATIVE
        return op

    @property
    def max_spatial_order(self) -> int:
        return 3 if self.family in THIRD_ORDER_FAMILIES else 2

    def profile(self, r: float) -> TemporalProfile:
        """Eigenfunction of this equation's time operator with eigenvalue r."""
        if r <= 0.0:
            raise DomainError(f"no admissible temporal profile for r = {r:g}; r must be positive")
        return TemporalProfile(
            kind=PROFILE_FOR_OPERATOR[self.operator], r=r, alpha=self.alpha, beta=self.beta, nu=self.nu
        )

    def params(self) -> dict[str, Any]:
        """Parameters relevant to this family, for reports."""
        out: dict[str, Any] = {"time_operator": str(self.operator)}
        match self.operator:
            case TimeOperator.CAPUTO:
                out["alpha"] = self.alpha
            case TimeOperator.HYPER_BESSEL:
                out.update(alpha=self.alpha, beta=self.beta, nu=self.nu)
        if self.family is Family.BURGERS_POWER_N:
            out.update(n=self.n, parse_mode=str(self.parse_mode))
        if self.family in VAR_COEF_FAMILIES:
            out.update(k=self.k, r=self.r)
        return out


class SolutionAnsatz(BaseModel):
    """u(x, t) = R e^{kx} f(t)."""

    model_config = ConfigDict(frozen=True)

    R: float
    k: float
    profile: TemporalProfile

    @property
    def r(self) -> float:
        return self.profile.r

    def value(self, x: float, t: float, policy: SeriesEvalPolicy = DEFAULT_POLICY) -> float:
        return self.R * float(np.exp(self.k * x)) * self.profile.value(t, policy)

    def sample(
        self, x: ArrayLike, t: ArrayLike, policy: SeriesEvalPolicy = DEFAULT_POLICY
    ) -> FloatArray:
        """Outer-product samples, shape (len(x), len(t))."""
        spatial = self.R * np.exp(self.k * np.asarray(x, dtype=np.float64))
        return np.multiply.outer(spatial, self.profile.sample(t, policy))

    def on_grid(self, grid_x: Grid1D, grid_t: Grid1D, policy: SeriesEvalPolicy = DEFAULT_POLICY) -> SampledField:
        return SampledField(grid_x, grid_t, self.sample(grid_x.nodes, grid_t.nodes, policy))


def dispersion(eq: EquationSpec, k: float) -> float:
    """Closed-form r(k) for which the separable ansatz solves eq."""
    if k == 0.0:
        raise DomainError("wave number k must be non-zero")
    if eq.family in VAR_COEF_FAMILIES:
        assert eq.r is not None
        return eq.r
    if eq.family in KDV_FAMILIES:
        return k**3
    if eq.family is Family.BURGERS_POWER_N:
        if eq.parse_mode is ParseMode.LITERAL:
            return 2.0**eq.n * k ** (eq.n + 1) - k**2
        return 2.0 * k ** (eq.n + 1) - k**2
    return k**2


def build_solution(eq: EquationSpec, R: float, k: float, force_r: float | None = None) -> SolutionAnsatz:
    """Exact solution of eq with amplitude R and wave number k.

    force_r replaces the dispersion relation, for negative controls.
    """
    if R == 0.0:
        raise DomainError("amplitude R must be non-zero")
    if k == 0.0:
        raise DomainError("wave number k must be non-zero")
    if eq.family in VAR_COEF_FAMILIES:
        if R != 1.0:
            raise BalanceError(f"{eq.family} balances a(x)uu_x against b(t)u_xx only for R = 1, got R = {R:g}")
        if k != eq.k:
            raise BalanceError(f"ansatz wave number {k:g} differs from the equation's k = {eq.k:g}")
    r = dispersion(eq, k) if force_r is None else force_r
    ansatz = SolutionAnsatz(R=R, k=k, profile=eq.profile(r))
    logger.debug("Built solution", equation=str(eq.family), R=R, k=k, r=r, profile=ansatz.profile.describe())
    return ansatz
