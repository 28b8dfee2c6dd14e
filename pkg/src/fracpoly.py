"""Exact operator algebra on truncated generalized power series.

A PhasedPowerSeries holds terms c_j x^{p_j} on x > 0 with complex
coefficients. The phase of (-1)^gamma is fixed to exp(i pi gamma) on the
principal branch, so (-x)^gamma is stored as (exp(i pi gamma), gamma).
Every operator here acts term by term and returns a new series.
"""

import cmath
import math
from collections.abc import Iterable
from dataclasses import dataclass, field
from enum import StrEnum
from typing import Self

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import DomainError, SeriesInvariantError
from .specfun import gamma_ratio, hyper_bessel_w_coefficient, laguerre_coefficient, power_over_gamma

MAX_TERMS = 256
EXPONENT_ATOL = 1e-9


def phase(exponent: float) -> complex:
    """(-1)^exponent on the principal branch; exactly +-1 for integers."""
    if float(exponent).is_integer():
        return complex(1.0 if int(exponent) % 2 == 0 else -1.0)
    return cmath.exp(1j * math.pi * exponent)


@dataclass(frozen=True, eq=False)
class PhasedPowerSeries:
    coeffs: NDArray[np.complex128] = field(default_factory=lambda: np.zeros(0, dtype=np.complex128))
    exponents: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0, dtype=np.float64))

    def __post_init__(self) -> None:
        coeffs = np.asarray(self.coeffs, dtype=np.complex128).reshape(-1).copy()
        exponents = np.asarray(self.exponents, dtype=np.float64).reshape(-1).copy()
        if coeffs.shape != exponents.shape:
            raise SeriesInvariantError("coefficient and exponent counts differ")
        if coeffs.size > MAX_TERMS:
            raise SeriesInvariantError(f"series has {coeffs.size} terms, cap is {MAX_TERMS}")
        if not np.all(np.isfinite(coeffs)):
            raise SeriesInvariantError("series coefficients must be finite")
        if np.any(exponents <= -1.0):
            raise SeriesInvariantError(f"exponent {exponents.min():g} is not above -1")
        if np.any(np.diff(exponents) <= 0.0):
            raise SeriesInvariantError("exponents must be strictly increasing")
        coeffs.setflags(write=False)
        exponents.setflags(write=False)
        object.__setattr__(self, "coeffs", coeffs)
        object.__setattr__(self, "exponents", exponents)

    @classmethod
    def from_terms(cls, terms: Iterable[tuple[complex, float]]) -> Self:
        """Build a series from (coeff, exponent) pairs in any order, merging equal exponents."""
        coeffs: list[complex] = []
        exponents: list[float] = []
        for coeff, exponent in sorted(terms, key=lambda term: term[1]):
            if exponents and abs(exponent - exponents[-1]) <= EXPONENT_ATOL:
                coeffs[-1] += coeff
            else:
                coeffs.append(complex(coeff))
                exponents.append(float(exponent))
        return cls(np.array(coeffs, dtype=np.complex128), np.array(exponents, dtype=np.float64))

    @classmethod
    def monomial(cls, exponent: float, coeff: complex = 1.0) -> Self:
        return cls(np.array([coeff], dtype=np.complex128), np.array([exponent], dtype=np.float64))

    @property
    def terms(self) -> list[tuple[complex, float]]:
        return [(complex(c), float(p)) for c, p in zip(self.coeffs, self.exponents, strict=True)]

    def __len__(self) -> int:
        return int(self.coeffs.size)

    def __add__(self, other: "PhasedPowerSeries") -> "PhasedPowerSeries":
        return PhasedPowerSeries.from_terms(self.terms + other.terms)

    def __neg__(self) -> "PhasedPowerSeries":
        return self.scaled(-1.0)

    def scaled(self, factor: complex) -> "PhasedPowerSeries":
        return PhasedPowerSeries(self.coeffs * factor, self.exponents)

    def truncate(self, n_terms: int) -> "PhasedPowerSeries":
        """Keep the n_terms lowest-order terms."""
        return PhasedPowerSeries(self.coeffs[:n_terms], self.exponents[:n_terms])

    def evaluate(self, x: ArrayLike) -> NDArray[np.complex128]:
        """Sum c_j x^{p_j} at points x >= 0."""
        points = np.asarray(x, dtype=np.float64)
        if np.any(points < 0.0):
            raise DomainError("series are defined on x >= 0 only")
        powers = np.power(points[..., None], self.exponents)
        return powers @ self.coeffs

    def to_text(self) -> str:
        """Plain-text form, one `coeff_re coeff_im exponent` line per term."""
        return "".join(f"{c.real:.17g} {c.imag:.17g} {p:.17g}\n" for c, p in self.terms)

    @classmethod
    def from_text(cls, text: str) -> Self:
        terms: list[tuple[complex, float]] = []
        for lineno, line in enumerate(text.splitlines(), start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            fields = stripped.split()
            if len(fields) != 3:
                raise SeriesInvariantError(f"line {lineno}: expected 3 fields, got {len(fields)}")
            real, imag, exponent = (float(value) for value in fields)
            terms.append((complex(real, imag), exponent))
        return cls(
            np.array([term[0] for term in terms], dtype=np.complex128),
            np.array([term[1] for term in terms], dtype=np.float64),
        )


class OperatorKind(StrEnum):
    DERIVATIVE = "derivative"
    MULTIPLY_BY_POWER = "multiply_by_power"
    CAPUTO = "caputo"
    LAGUERRE = "laguerre"
    LAGUERRE_POWER = "laguerre_power"
    HYPER_BESSEL = "hyper_bessel"
    FRAC_LAGUERRE = "frac_laguerre"


@dataclass(frozen=True)
class OperatorDescriptor:
    kind: OperatorKind
    gamma: float = 0.0
    alpha: float = 1.0
    beta: float = 1.0
    nu: float = 1.0
    m: int = 1

    def __post_init__(self) -> None:
        if self.kind in (OperatorKind.CAPUTO, OperatorKind.HYPER_BESSEL, OperatorKind.FRAC_LAGUERRE):
            _check_order(self.alpha, "alpha")
        if self.kind in (OperatorKind.HYPER_BESSEL, OperatorKind.FRAC_LAGUERRE):
            _check_order(self.beta, "beta")
            if self.nu <= 0.0:
                raise DomainError(f"nu must be positive, got {self.nu:g}")
        if self.kind is OperatorKind.LAGUERRE_POWER and not 1 <= self.m <= 16:
            raise DomainError(f"laguerre power m must be in [1, 16], got {self.m}")

    def apply(self, s: PhasedPowerSeries) -> PhasedPowerSeries:
        match self.kind:
            case OperatorKind.DERIVATIVE:
                return differentiate(s)
            case OperatorKind.MULTIPLY_BY_POWER:
                return multiply_by_power(s, self.gamma)
            case OperatorKind.CAPUTO:
                return caputo(s, self.alpha)
            case OperatorKind.LAGUERRE:
                return laguerre_derivative(s)
            case OperatorKind.LAGUERRE_POWER:
                return laguerre_power(s, self.m)
            case OperatorKind.HYPER_BESSEL:
                return hyper_bessel_op(s, self.alpha, self.beta, self.nu)
            case OperatorKind.FRAC_LAGUERRE:
                return frac_laguerre_op(s, self.alpha, self.beta, self.nu)


def _check_order(value: float, name: str) -> None:
    if not 0.0 < value <= 1.0:
        raise DomainError(f"{name} must lie in (0, 1], got {value:g}")


def _is_zero_exponent(p: float) -> bool:
    return abs(p) <= EXPONENT_ATOL


def differentiate(s: PhasedPowerSeries) -> PhasedPowerSeries:
    """d/dx term by term: (c, p) -> (c p, p - 1); constants vanish."""
    keep = ~np.isclose(s.exponents, 0.0, rtol=0.0, atol=EXPONENT_ATOL)
    return PhasedPowerSeries(s.coeffs[keep] * s.exponents[keep], s.exponents[keep] - 1.0)


def multiply_by_power(s: PhasedPowerSeries, gamma: float) -> PhasedPowerSeries:
    """Multiply by x^gamma."""
    return PhasedPowerSeries(s.coeffs, s.exponents + gamma)


def caputo(s: PhasedPowerSeries, alpha: float) -> PhasedPowerSeries:
    """Caputo derivative of order alpha via the power rule; constants vanish."""
    _check_order(alpha, "alpha")
    if alpha == 1.0:
        return differentiate(s)
    terms: list[tuple[complex, float]] = []
    for coeff, p in s.terms:
        if _is_zero_exponent(p):
            continue
        if p < 0.0:
            raise SeriesInvariantError(f"Caputo power rule needs p = 0 or p > 0, got p = {p:g}")
        terms.append((coeff * gamma_ratio(p + 1.0, p - alpha + 1.0), p - alpha))
    return PhasedPowerSeries.from_terms(terms)


def laguerre_derivative(s: PhasedPowerSeries) -> PhasedPowerSeries:
    """Laguerre derivative -d/dx x d/dx: (c, p) -> (-c p^2, p - 1)."""
    return -differentiate(multiply_by_power(differentiate(s), 1.0))


def laguerre_power(s: PhasedPowerSeries, m: int) -> PhasedPowerSeries:
    """m-fold Laguerre derivative."""
    if not 1 <= m <= 16:
        raise DomainError(f"laguerre power m must be in [1, 16], got {m}")
    result = s
    for _ in range(m):
        result = laguerre_derivative(result)
    return result


def laguerre_power_direct(s: PhasedPowerSeries, m: int) -> PhasedPowerSeries:
    """(-1)^m d^m/dx^m x^m d^m/dx^m, the closed form the m-fold power must match."""
    result = s
    for _ in range(m):
        result = differentiate(result)
    result = multiply_by_power(result, float(m))
    for _ in range(m):
        result = differentiate(result)
    return result.scaled((-1.0) ** m)


def hyper_bessel_op(s: PhasedPowerSeries, alpha: float, beta: float, nu: float) -> PhasedPowerSeries:
    """x^{alpha-nu} D^beta (x^nu D^alpha s) with Caputo derivatives."""
    _check_order(alpha, "alpha")
    _check_order(beta, "beta")
    if nu <= 0.0:
        raise DomainError(f"nu must be positive, got {nu:g}")
    inner = multiply_by_power(caputo(s, alpha), nu)
    return multiply_by_power(caputo(inner, beta), alpha - nu)


def frac_laguerre_op(s: PhasedPowerSeries, alpha: float, beta: float, nu: float) -> PhasedPowerSeries:
    """Fractional Laguerre-type derivative (-1)^beta x^{alpha-nu} D^beta (x^nu D^alpha s)."""
    return hyper_bessel_op(s, alpha, beta, nu).scaled(phase(beta))


def exp_laguerre(n: int, y: float) -> PhasedPowerSeries:
    """exp(y L) l_n(x), which terminates because L^{n+1} l_n = 0."""
    if not 0 <= n <= 30:
        raise DomainError(f"exp_laguerre requires 0 <= n <= 30, got {n}")
    current = lower_l_series(n)
    total = current
    weight = 1.0
    for m in range(1, n + 1):
        current = laguerre_derivative(current)
        weight *= y / m
        total = total + current.scaled(weight)
    return total


# Series builders


def lower_l_series(index: float) -> PhasedPowerSeries:
    """l_index(x) = (-x)^index / Gamma(index + 1); index may be real."""
    return PhasedPowerSeries.monomial(index, phase(index) * power_over_gamma(1.0, 0, index + 1.0))


def l_alpha_nu_series(n: float, alpha: float, nu: float) -> PhasedPowerSeries:
    """Generalized monomial (-x)^n / Gamma(n - alpha + nu + 1)."""
    return PhasedPowerSeries.monomial(n, phase(n) * power_over_gamma(1.0, 0, n - alpha + nu + 1.0))


def tilde_l_series(n: int, alpha: float, beta: float, nu: float) -> PhasedPowerSeries:
    """prod_{i<=n} Gamma(beta i + 1 - alpha)/Gamma(beta i + 1) (-x)^{beta n} / Gamma(beta n - alpha + nu + 1)."""
    return PhasedPowerSeries.monomial(beta * n, phase(beta * n) * hyper_bessel_w_coefficient(n, alpha, beta, nu))


def laguerre_poly_series(n: int, y: float) -> PhasedPowerSeries:
    """L_n(x, y) expanded in powers of x."""
    if not 0 <= n <= 170:
        raise DomainError(f"laguerre_poly_series requires 0 <= n <= 170, got {n}")
    return PhasedPowerSeries(
        np.array([(-1.0) ** r * laguerre_coefficient(n, r) * y ** (n - r) for r in range(n + 1)], dtype=np.complex128),
        np.arange(n + 1, dtype=np.float64),
    )


def tricomi_series(lam: float, n_terms: int) -> PhasedPowerSeries:
    """First n_terms of C0(lam x) = sum (-lam)^r x^r / (r!)^2."""
    coeffs = np.empty(n_terms, dtype=np.complex128)
    term = 1.0
    for r in range(n_terms):
        coeffs[r] = term
        term *= -lam / ((r + 1) * (r + 1))
    return PhasedPowerSeries(coeffs, np.arange(n_terms, dtype=np.float64))


# Comparison


def align(a: PhasedPowerSeries, b: PhasedPowerSeries) -> list[tuple[float, complex, complex]]:
    """Pair terms of a and b with matching exponents; a missing side contributes 0."""
    rows: list[tuple[float, complex, complex]] = []
    i = j = 0
    while i < len(a) or j < len(b):
        pa = a.exponents[i] if i < len(a) else math.inf
        pb = b.exponents[j] if j < len(b) else math.inf
        if abs(pa - pb) <= EXPONENT_ATOL:
            rows.append((float(pa), complex(a.coeffs[i]), complex(b.coeffs[j])))
            i += 1
            j += 1
        elif pa < pb:
            rows.append((float(pa), complex(a.coeffs[i]), 0j))
            i += 1
        else:
            rows.append((float(pb), 0j, complex(b.coeffs[j])))
            j += 1
    return rows


def max_deviation(actual: PhasedPowerSeries, expected: PhasedPowerSeries, relative: bool = False) -> float:
    """Largest coefficient difference; relative mode divides by max(1, |expected|)."""
    deviation = 0.0
    for _, ca, cb in align(actual, expected):
        diff = abs(ca - cb)
        if relative:
            diff /= max(1.0, abs(cb))
        deviation = max(deviation, diff)
    return deviation


@dataclass(frozen=True)
class PhaseComparison:
    """Magnitude agreement plus the common phase factor actual/expected."""

    magnitude_deviation: float
    phase_factor: complex
    phase_spread: float
    unmatched_terms: int

    def phase_mismatch(self, atol: float = 1e-12) -> bool:
        return abs(self.phase_factor - 1.0) > atol


def compare_phased(actual: PhasedPowerSeries, expected: PhasedPowerSeries) -> PhaseComparison:
    """Compare coefficient magnitudes exactly and report the phase discrepancy separately."""
    magnitude_deviation = 0.0
    ratios: list[complex] = []
    unmatched = 0
    for _, ca, cb in align(actual, expected):
        if ca == 0 or cb == 0:
            if abs(ca) + abs(cb) > 0:
                unmatched += 1
            magnitude_deviation = max(magnitude_deviation, abs(ca) + abs(cb))
            continue
        magnitude_deviation = max(magnitude_deviation, abs(abs(ca) - abs(cb)) / max(1.0, abs(cb)))
        ratio = ca / cb
        ratios.append(ratio / abs(ratio))
    if not ratios:
        return PhaseComparison(magnitude_deviation, 1.0 + 0j, 0.0, unmatched)
    factor = ratios[0]
    spread = max(abs(r - factor) for r in ratios)
    return PhaseComparison(magnitude_deviation, factor, spread, unmatched)
