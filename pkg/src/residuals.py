"""Residual evaluation of catalog equations, verification reports and the numeric dispersion oracle.

Two modes:

- exact-time: the time-operator term is replaced by -r u (the profile's
  eigen-relation) and spatial derivatives are taken analytically from the
  ansatz, so only the spatial algebra is tested.
- fd: every derivative is computed numerically from samples.
"""

import math
import time
from dataclasses import dataclass
from enum import StrEnum
from typing import Any

import numpy as np
from numpy.typing import NDArray
from pydantic import BaseModel, ConfigDict, Field

from .config import settings
from .equations import VAR_COEF_FAMILIES, EquationSpec, Family, ParseMode, SolutionAnsatz
from .errors import DomainError, GridError, MaskError, NotAffineError
from .logging_config import get_logger
from .metrics import verification_duration_seconds, verifications_total
from .numops import FloatArray, Grid1D, SampledField, fd_derivative
from .profiles import apply_time_operator_fd, is_fractional
from .specfun import DEFAULT_POLICY, SeriesEvalPolicy

logger = get_logger(__name__)

MAX_MASKED_FRACTION = 0.5
# trial eigenvalues of the affine fit
_TRIAL_R = (1.0, 2.0, 3.0)
_AFFINE_RTOL = 1e-9


class ResidualMode(StrEnum):
    EXACT_TIME = "exact-time"
    FD = "fd"


@dataclass(frozen=True, eq=False)
class EquationTerms:
    """Additive terms of an equation's left-hand side on a grid.

    valid: every term is computable there. masked: excluded by the zero mask.
    """

    grid_x: Grid1D
    grid_t: Grid1D
    u: FloatArray
    terms: dict[str, FloatArray]
    valid: NDArray[np.bool_]
    masked: NDArray[np.bool_]

    @property
    def usable(self) -> NDArray[np.bool_]:
        return self.valid & ~self.masked

    @property
    def masked_fraction(self) -> float:
        return float(self.masked.mean())

    def total(self) -> FloatArray:
        with np.errstate(invalid="ignore"):
            return sum(self.terms.values(), np.zeros_like(self.u))

    def scale(self) -> float:
        """Largest single-term magnitude over usable nodes."""
        stacked = np.abs(np.stack(list(self.terms.values())))
        return float(stacked[:, self.usable].max(initial=0.0))


def spatial_terms(
    eq: EquationSpec,
    u: FloatArray,
    ux: FloatArray,
    uxx: FloatArray,
    uxxx: FloatArray | None,
    x: FloatArray,
    b: FloatArray | None,
) -> dict[str, FloatArray]:
    """Non-time terms of eq given u and its x-derivatives.

    x and b (the variable diffusion coefficient) broadcast against u.
    """
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        match eq.family:
            case Family.BURGERS_POWER_N if eq.parse_mode is ParseMode.LITERAL:
                return {"advection": (2.0 * ux / u) ** eq.n * ux, "diffusion": -uxx}
            case Family.BURGERS_POWER_N:
                return {"advection": 2.0 * (ux / u) ** eq.n * ux, "diffusion": -uxx}
            case Family.BURGERS_HIGH_ORDER:
                assert uxxx is not None
                return {"advection": (u - (ux * ux + uxxx) / uxx) * ux, "diffusion": 2.0 * uxx}
            case Family.KDV_LAGUERRE | Family.KDV_GENERAL_OT:
                assert uxxx is not None
                return {"advection": 2.0 * uxx / u * ux, "dispersion": -uxxx}
            case Family.VAR_COEF_BURGERS | Family.VAR_COEF_GENERAL_OT:
                assert b is not None and eq.k is not None and eq.r is not None
                return {
                    "advection": eq.k * np.exp(-eq.k * x) * u * ux,
                    "diffusion": -b * uxx,
                    "reaction": eq.r * u,
                }
            case _:
                return {"advection": 2.0 * ux / u * ux, "diffusion": -uxx}


def _diffusion_coefficient(eq: EquationSpec, t: FloatArray, policy: SeriesEvalPolicy) -> FloatArray | None:
    if eq.family not in VAR_COEF_FAMILIES:
        return None
    assert eq.r is not None
    return eq.profile(eq.r).sample(t, policy)


def _zero_mask(values: FloatArray, threshold: float) -> NDArray[np.bool_]:
    finite = np.isfinite(values)
    peak = float(np.abs(values[finite]).max(initial=0.0))
    return finite & (np.abs(values) < threshold * peak)


def evaluate_terms(
    eq: EquationSpec,
    u: SampledField | SolutionAnsatz,
    grid_x: Grid1D | None = None,
    grid_t: Grid1D | None = None,
    mode: ResidualMode = ResidualMode.FD,
    policy: SeriesEvalPolicy = DEFAULT_POLICY,
) -> EquationTerms:
    """Sample the additive terms of eq's left-hand side on grid_x x grid_t."""
    if isinstance(u, SampledField):
        if mode is ResidualMode.EXACT_TIME:
            raise DomainError("exact-time mode needs a SolutionAnsatz, not sampled values")
        field = u
    else:
        if grid_x is None or grid_t is None:
            raise GridError("grids are required to sample a SolutionAnsatz")
        field = u.on_grid(grid_x, grid_t, policy)
    gx, gt = field.grid_x, field.grid_t
    values = np.where(field.valid, field.values, np.nan)
    x = gx.nodes[:, None]
    t = gt.nodes[None, :]
    third_order = eq.max_spatial_order == 3

    if mode is ResidualMode.EXACT_TIME:
        assert isinstance(u, SolutionAnsatz)
        k = u.k
        ux, uxx = k * values, k**2 * values
        uxxx = k**3 * values if third_order else None
        time_term = -u.r * values
    else:
        fractional = is_fractional(eq.operator, eq.alpha, eq.beta)
        if fractional:
            gt.require_origin()
        ux = fd_derivative(values, gx.h, 1, axis=0)
        uxx = fd_derivative(values, gx.h, 2, axis=0)
        uxxx = fd_derivative(values, gx.h, 3, axis=0) if third_order else None
        time_term = apply_time_operator_fd(eq.operator, values, gt, eq.alpha, eq.beta, eq.nu, axis=1)

    b = _diffusion_coefficient(eq, gt.nodes, policy)
    terms = {"time": time_term, **spatial_terms(eq, values, ux, uxx, uxxx, x, None if b is None else b[None, :])}
    terms = {name: np.broadcast_to(term, values.shape) for name, term in terms.items()}

    threshold = settings.zero_mask_threshold
    masked = _zero_mask(values, threshold)
    if eq.family is Family.BURGERS_HIGH_ORDER:
        masked |= _zero_mask(uxx, threshold)

    valid = np.all(np.stack([np.isfinite(term) | masked for term in terms.values()]), axis=0) & field.valid
    if mode is ResidualMode.FD and is_fractional(eq.operator, eq.alpha, eq.beta):
        cutoff = gt.start + settings.fd_startup_layer * (gt.stop - gt.start)
        valid &= np.broadcast_to(t >= cutoff, values.shape)

    result = EquationTerms(gx, gt, values, terms, valid, masked & field.valid)
    if result.masked_fraction > MAX_MASKED_FRACTION:
        raise MaskError(f"zero mask covers {result.masked_fraction:.1%} of the grid")
    return result


def residual(
    eq: EquationSpec,
    u: SampledField | SolutionAnsatz,
    grid_x: Grid1D | None = None,
    grid_t: Grid1D | None = None,
    mode: ResidualMode = ResidualMode.FD,
    policy: SeriesEvalPolicy = DEFAULT_POLICY,
) -> SampledField:
    """Pointwise left-hand side of eq; masked and invalid nodes are NaN and marked invalid."""
    terms = evaluate_terms(eq, u, grid_x, grid_t, mode, policy)
    usable = terms.usable
    return SampledField(terms.grid_x, terms.grid_t, np.where(usable, terms.total(), np.nan), usable)


class GridMetadata(BaseModel):
    x_min: float
    x_max: float
    nx: int
    t_min: float
    t_max: float
    nt: int

    @classmethod
    def from_grids(cls, grid_x: Grid1D, grid_t: Grid1D) -> "GridMetadata":
        return cls(
            x_min=grid_x.start,
            x_max=grid_x.stop,
            nx=grid_x.count,
            t_min=grid_t.start,
            t_max=grid_t.stop,
            nt=grid_t.count,
        )


class ResidualReport(BaseModel):
    """Residual statistics over the usable nodes of a grid."""

    model_config = ConfigDict(populate_by_name=True)

    equation: str
    params: dict[str, Any]
    R: float
    k: float
    r: float
    mode: ResidualMode
    grid: GridMetadata
    max_abs: float
    rms: float
    normalized: float
    masked_fraction: float = Field(ge=0.0, le=1.0)
    valid_nodes: int
    reliable: bool
    tolerance: float
    passed: bool = Field(alias="pass")

    def to_json(self) -> str:
        return self.model_dump_json(by_alias=True)


def verify(
    eq: EquationSpec,
    ansatz: SolutionAnsatz,
    grid_x: Grid1D,
    grid_t: Grid1D,
    tol: float | None = None,
    mode: ResidualMode = ResidualMode.EXACT_TIME,
    policy: SeriesEvalPolicy = DEFAULT_POLICY,
) -> ResidualReport:
    """Evaluate the residual of ansatz in eq and compare the normalized maximum with tol."""
    tolerance = settings.tolerance_for(mode) if tol is None else tol
    started = time.perf_counter()
    terms = evaluate_terms(eq, ansatz, grid_x, grid_t, mode, policy)
    usable = terms.usable
    if not usable.any():
        raise MaskError("no usable nodes left after masking")

    values = terms.total()[usable]
    max_abs = float(np.abs(values).max())
    rms = float(np.sqrt(np.mean(values**2)))
    scale = terms.scale()
    normalized = max_abs / scale if scale > 0.0 else math.inf
    passed = normalized <= tolerance

    report = ResidualReport(
        equation=str(eq.family),
        params=eq.params(),
        R=ansatz.R,
        k=ansatz.k,
        r=ansatz.r,
        mode=mode,
        grid=GridMetadata.from_grids(grid_x, grid_t),
        max_abs=max_abs,
        rms=rms,
        normalized=normalized,
        masked_fraction=terms.masked_fraction,
        valid_nodes=int(usable.sum()),
        reliable=terms.masked_fraction < MAX_MASKED_FRACTION,
        tolerance=tolerance,
        passed=passed,
    )
    verification_duration_seconds.labels(mode=str(mode)).observe(time.perf_counter() - started)
    verifications_total.labels(equation=str(eq.family), mode=str(mode), outcome="pass" if passed else "fail").inc()
    logger.info(
        "Verification finished",
        equation=str(eq.family),
        mode=str(mode),
        normalized=normalized,
        tolerance=tolerance,
        passed=passed,
    )
    return report


def _trial_ratio(eq: EquationSpec, k: float, r: float, policy: SeriesEvalPolicy) -> float:
    """Exact-time residual divided by u at (x, t) = (0, 0) for the ansatz with eigenvalue r."""
    ansatz = SolutionAnsatz(R=1.0, k=k, profile=eq.profile(r))
    x = np.zeros(1)
    u = ansatz.sample(x, np.zeros(1), policy)
    if not np.all(np.abs(u) > 0.0):
        raise MaskError("sample point lies on a zero of u")
    uxx = k**2 * u
    b = _diffusion_coefficient(eq, np.zeros(1), policy)
    terms = spatial_terms(eq, u, k * u, uxx, k**3 * u, x[:, None], b)
    total = -r * u + sum(terms.values())
    return float(total.item() / u.item())


def solve_dispersion_numeric(eq: EquationSpec, k: float, policy: SeriesEvalPolicy = DEFAULT_POLICY) -> float:
    """Root in r of the exact-time residual, assuming it is affine in r.

    The residual over u is sampled at three trial eigenvalues; two fix the
    line and the third checks it.
    """
    if k == 0.0:
        raise DomainError("wave number k must be non-zero")
    phi = [_trial_ratio(eq, k, r, policy) for r in _TRIAL_R]
    if not all(math.isfinite(p) for p in phi):
        raise MaskError("residual is not finite at the sample point")
    (r1, r2, r3), (p1, p2, p3) = _TRIAL_R, phi
    slope = (p2 - p1) / (r2 - r1)
    if abs(slope) < _AFFINE_RTOL:
        raise NotAffineError("residual does not depend on r")
    predicted = p1 + slope * (r3 - r1)
    if abs(p3 - predicted) > _AFFINE_RTOL * max(1.0, abs(p3), abs(predicted)):
        raise NotAffineError(f"residual is not affine in r: expected {predicted:.15g} at r = {r3:g}, got {p3:.15g}")
    root = r1 - p1 / slope
    logger.debug("Numeric dispersion", equation=str(eq.family), k=k, r=root)
    return root
