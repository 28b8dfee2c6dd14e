"""Finite-difference and L1-scheme oracles on uniform grids.

Invalid nodes (stencil boundaries, the t = 0 node of fractional operators)
are returned as NaN so downstream statistics can mask them.
"""

from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray
from pydantic import BaseModel, ConfigDict, Field, model_validator

from .errors import DomainError, GridError
from .specfun import gamma

FloatArray = NDArray[np.float64]


class Grid1D(BaseModel):
    """Uniform grid with count nodes from start to stop inclusive."""

    model_config = ConfigDict(frozen=True)

    start: float
    stop: float
    count: int = Field(ge=9)

    @model_validator(mode="after")
    def check_range(self) -> "Grid1D":
        if not self.stop > self.start:
            raise ValueError(f"grid stop {self.stop:g} must exceed start {self.start:g}")
        return self

    @property
    def h(self) -> float:
        return (self.stop - self.start) / (self.count - 1)

    @property
    def nodes(self) -> FloatArray:
        return np.linspace(self.start, self.stop, self.count)

    def require_origin(self) -> None:
        if self.start != 0.0:
            raise GridError(f"fractional time operators need a grid starting at 0, got start = {self.start:g}")


@dataclass(frozen=True, eq=False)
class SampledField:
    """Values of u(x, t) on grid_x x grid_t; valid marks nodes that carry a value."""

    grid_x: Grid1D
    grid_t: Grid1D
    values: FloatArray
    valid: NDArray[np.bool_] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        expected = (self.grid_x.count, self.grid_t.count)
        if values.shape != expected:
            raise GridError(f"field shape {values.shape} does not match grids {expected}")
        valid = np.ones(expected, dtype=bool) if self.valid is None else np.asarray(self.valid, dtype=bool)
        if valid.shape != expected:
            raise GridError(f"valid mask shape {valid.shape} does not match grids {expected}")
        if not np.all(np.isfinite(values[valid])):
            raise GridError("field values must be finite at valid nodes")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "valid", valid)

    @classmethod
    def from_function(cls, grid_x: Grid1D, grid_t: Grid1D, values: ArrayLike) -> "SampledField":
        return cls(grid_x, grid_t, np.asarray(values, dtype=np.float64))


def _min_samples(order: int) -> int:
    return 7 if order == 3 else 5


def fd_derivative(samples: ArrayLike, h: float, order: Literal[1, 2, 3], axis: int = -1) -> FloatArray:
    """Second-order central difference of the given order; boundary nodes are NaN."""
    if order not in (1, 2, 3):
        raise DomainError(f"finite-difference order must be 1, 2 or 3, got {order}")
    u = np.moveaxis(np.asarray(samples, dtype=np.float64), axis, -1)
    n = u.shape[-1]
    if n < _min_samples(order):
        raise GridError(f"order {order} stencil needs at least {_min_samples(order)} samples, got {n}")
    out = np.full(u.shape, np.nan)
    if order == 1:
        out[..., 1:-1] = (u[..., 2:] - u[..., :-2]) / (2.0 * h)
    elif order == 2:
        out[..., 1:-1] = (u[..., 2:] - 2.0 * u[..., 1:-1] + u[..., :-2]) / (h * h)
    else:
        out[..., 2:-2] = (-u[..., :-4] + 2.0 * u[..., 1:-3] - 2.0 * u[..., 3:-1] + u[..., 4:]) / (2.0 * h**3)
    return np.moveaxis(out, -1, axis)


def _broadcast_nodes(nodes: FloatArray, ndim: int, axis: int) -> FloatArray:
    shape = [1] * ndim
    shape[axis] = nodes.size
    return nodes.reshape(shape)


def laguerre_time_fd(samples: ArrayLike, t_grid: Grid1D, axis: int = -1) -> FloatArray:
    """Laguerre derivative in t, -u_t - t u_tt, in expanded form."""
    u = np.asarray(samples, dtype=np.float64)
    t = _broadcast_nodes(t_grid.nodes, u.ndim, axis)
    return -fd_derivative(u, t_grid.h, 1, axis) - t * fd_derivative(u, t_grid.h, 2, axis)


def _l1_weights(count: int, alpha: float) -> FloatArray:
    j = np.arange(count, dtype=np.float64)
    return (j + 1.0) ** (1.0 - alpha) - j ** (1.0 - alpha)


def caputo_l1(samples: ArrayLike, t_grid: Grid1D, alpha: float, axis: int = -1) -> FloatArray:
    """L1 scheme for the Caputo derivative of order alpha in (0, 1), nodes 1..N.

    Node 0 is NaN. A non-finite sample invalidates every later node, since
    the scheme sums the whole history.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError(f"L1 scheme requires 0 < alpha < 1, got {alpha:g}")
    t_grid.require_origin()
    u = np.moveaxis(np.asarray(samples, dtype=np.float64), axis, -1)
    n = u.shape[-1]
    if n != t_grid.count:
        raise GridError(f"{n} samples do not match a {t_grid.count}-node grid")
    increments = np.diff(u, axis=-1)
    broken = np.logical_or.accumulate(~np.isfinite(u), axis=-1)[..., 1:]
    increments = np.where(np.isfinite(increments), increments, 0.0)

    weights = _l1_weights(n - 1, alpha)
    lag = np.subtract.outer(np.arange(n - 1), np.arange(n - 1))
    kernel = np.where(lag >= 0, weights[np.clip(lag, 0, None)], 0.0)
    scale = t_grid.h ** (-alpha) / gamma(2.0 - alpha)

    out = np.full(u.shape, np.nan)
    out[..., 1:] = np.where(broken, np.nan, scale * (increments @ kernel.T))
    return np.moveaxis(out, -1, axis)


def _time_stage(samples: FloatArray, t_grid: Grid1D, order: float, axis: int) -> FloatArray:
    if order == 1.0:
        return fd_derivative(samples, t_grid.h, 1, axis)
    return caputo_l1(samples, t_grid, order, axis)


def hyper_bessel_fd(
    samples: ArrayLike, t_grid: Grid1D, alpha: float, beta: float, nu: float, axis: int = -1
) -> FloatArray:
    """t^{alpha-nu} D^beta (t^nu D^alpha u), each stage by L1 (or central differences at order 1).

    The intermediate t^nu D^alpha u is taken as 0 at t = 0, which holds whenever
    D^alpha u grows slower than t^{-nu} at the origin.
    """
    for name, value in (("alpha", alpha), ("beta", beta)):
        if not 0.0 < value <= 1.0:
            raise DomainError(f"{name} must lie in (0, 1], got {value:g}")
    if nu <= 0.0:
        raise DomainError(f"nu must be positive, got {nu:g}")
    t_grid.require_origin()
    u = np.moveaxis(np.asarray(samples, dtype=np.float64), axis, -1)
    t = t_grid.nodes

    inner = t**nu * _time_stage(u, t_grid, alpha, -1)
    inner[..., 0] = 0.0
    outer = _time_stage(inner, t_grid, beta, -1)

    weight = np.full(t.shape, np.nan)
    weight[1:] = t[1:] ** (alpha - nu)
    return np.moveaxis(weight * outer, -1, axis)
