"""Scalar special functions: Gamma, Tricomi C0, Mittag-Leffler, hyper-Bessel W, Laguerre polynomials.

Every infinite series is truncated under an explicit SeriesEvalPolicy. The
functions are pure and hold no shared state.
"""

import math
from collections.abc import Iterator

from pydantic import BaseModel, ConfigDict, Field, field_validator

from .config import settings
from .errors import ArgumentBoundError, ConvergenceError, DomainError, PoleError
from .logging_config import get_logger
from .metrics import series_evaluations_total, series_truncations_total

logger = get_logger(__name__)

# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_COEFFS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# beyond these the direct forms overflow
_GAMMA_DIRECT_MAX = 170.0
_LOG_POWER_MAX = 700.0
_EXACT_FACTORIAL_MAX = 20
# 170! is the largest factorial below the float64 limit
_FACTORIAL_GAMMA_MAX = 171.0


class SeriesEvalPolicy(BaseModel):
    """Truncation policy for the infinite series evaluated here."""

    model_config = ConfigDict(frozen=True)

    max_terms: int = Field(default=64, ge=8)
    rel_stop: float = Field(default=1e-16, gt=0.0, lt=1e-6)
    arg_bound: float = Field(default=30.0, gt=0.0)

    @classmethod
    def from_settings(cls) -> "SeriesEvalPolicy":
        return cls(
            max_terms=settings.series_max_terms,
            rel_stop=settings.series_rel_stop,
            arg_bound=settings.series_arg_bound,
        )

    def check_argument(self, value: float, function: str) -> None:
        if not math.isfinite(value) or abs(value) > self.arg_bound:
            raise ArgumentBoundError(f"{function}: |argument| = {abs(value):g} exceeds bound {self.arg_bound:g}")


DEFAULT_POLICY = SeriesEvalPolicy()


def _lanczos_sum(z: float) -> float:
    x = _LANCZOS_COEFFS[0]
    for i, coeff in enumerate(_LANCZOS_COEFFS[1:], start=1):
        x += coeff / (z + i)
    return x


def _is_pole(z: float) -> bool:
    return z <= 0 and z == math.floor(z)


def gamma(z: float) -> float:
    """Gamma function via the Lanczos approximation, reflection below 1/2.

    Positive integers up to 171 return the exact factorial (z - 1)!.
    """
    if _is_pole(z):
        raise PoleError(f"gamma has a pole at z = {z:g}")
    if z <= _FACTORIAL_GAMMA_MAX and z == math.floor(z):
        return float(math.factorial(int(z) - 1))
    if z < 0.5:
        return math.pi / (math.sin(math.pi * z) * gamma(1.0 - z))
    z -= 1.0
    t = z + _LANCZOS_G + 0.5
    # split the power so t**(z+1/2) does not overflow before exp(-t) is applied
    half = t ** ((z + 0.5) / 2.0)
    return _SQRT_2PI * half * (half * math.exp(-t)) * _lanczos_sum(z)


def log_gamma(z: float) -> float:
    """log Gamma(z) for z > 0."""
    if z <= 0:
        raise DomainError(f"log_gamma requires z > 0, got {z:g}")
    if z < 0.5:
        return math.log(math.pi / math.sin(math.pi * z)) - log_gamma(1.0 - z)
    z -= 1.0
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


def gamma_ratio(a: float, b: float) -> float:
    """Gamma(a) / Gamma(b) for positive arguments, switching to log form for large ones."""
    if a <= 0 or b <= 0:
        return gamma(a) / gamma(b)
    if a <= _GAMMA_DIRECT_MAX and b <= _GAMMA_DIRECT_MAX:
        return gamma(a) / gamma(b)
    return math.exp(log_gamma(a) - log_gamma(b))


def power_over_gamma(z: float, k: int | float, a: float) -> float:
    """z**k / Gamma(a), avoiding overflow of either factor.

    A pole of Gamma at a gives zero (1/Gamma vanishes there).
    """
    if _is_pole(a):
        return 0.0
    if k == 0:
        return 1.0 / gamma(a)
    if z == 0.0:
        return 0.0
    log_power = k * math.log(abs(z))
    if a <= _GAMMA_DIRECT_MAX and log_power < _LOG_POWER_MAX:
        return z**k / gamma(a)
    sign = 1.0 if z > 0 or (float(k).is_integer() and int(k) % 2 == 0) else -1.0
    return sign * math.exp(log_power - log_gamma(a))


def _sum_series(terms: Iterator[float], policy: SeriesEvalPolicy, function: str) -> float:
    """Sum terms until |term| <= rel_stop * |partial sum|.

    Raises:
        ConvergenceError: max_terms terms were accepted without meeting the stopping rule
    """
    series_evaluations_total.labels(function=function).inc()
    accepted: list[float] = []
    partial = 0.0
    for term in terms:
        accepted.append(term)
        partial += term
        if len(accepted) > 1 and abs(term) <= policy.rel_stop * abs(partial):
            return math.fsum(accepted)
        if len(accepted) >= policy.max_terms:
            break
    total = math.fsum(accepted)
    last_term = accepted[-1] if accepted else 0.0
    series_truncations_total.labels(function=function).inc()
    logger.warning(
        "Series truncated before convergence",
        function=function,
        terms=len(accepted),
        last_term=last_term,
        partial_sum=total,
    )
    raise ConvergenceError(
        f"{function}: series did not converge within {policy.max_terms} terms "
        f"(last term {last_term:.3g}, partial sum {total:.3g}); raise max_terms"
    )


def tricomi_c0(x: float, policy: SeriesEvalPolicy = DEFAULT_POLICY) -> float:
    """0-th order Tricomi function C0(x) = sum (-1)^r x^r / (r!)^2 = J0(2 sqrt(x))."""
    policy.check_argument(x, "tricomi_c0")

    def terms() -> Iterator[float]:
        term = 1.0
        r = 0
        while True:
            yield term
            r += 1
            term *= -x / (r * r)

    return _sum_series(terms(), policy, "tricomi_c0")


def mittag_leffler(alpha: float, z: float, policy: SeriesEvalPolicy = DEFAULT_POLICY) -> float:
    """One-parameter Mittag-Leffler function E_alpha(z) = sum z^k / Gamma(alpha k + 1).

    E_1 is exp; its alternating series loses digits to cancellation for z < 0.
    """
    if not 0.0 < alpha <= 1.0:
        raise DomainError(f"mittag_leffler requires 0 < alpha <= 1, got {alpha:g}")
    policy.check_argument(z, "mittag_leffler")
    if alpha == 1.0:
        series_evaluations_total.labels(function="mittag_leffler").inc()
        return math.exp(z)

    def terms() -> Iterator[float]:
        k = 0
        while True:
            yield power_over_gamma(z, k, alpha * k + 1.0)
            k += 1

    return _sum_series(terms(), policy, "mittag_leffler")


def hyper_bessel_w_coefficient(k: int, alpha: float, beta: float, nu: float) -> float:
    """k-th coefficient of W.

    prod_{i<=k} Gamma(beta i + 1 - alpha)/Gamma(beta i + 1) / Gamma(beta k + 1 - alpha + nu)
    """
    product = 1.0
    for i in range(1, k + 1):
        product *= gamma_ratio(beta * i + 1.0 - alpha, beta * i + 1.0)
    return product * power_over_gamma(1.0, 0, beta * k + 1.0 - alpha + nu)


def _check_hyper_bessel_params(alpha: float, beta: float, nu: float) -> None:
    if not (0.0 < alpha <= 1.0 and 0.0 < beta <= 1.0):
        raise DomainError(f"hyper-Bessel parameters require alpha, beta in (0, 1], got {alpha:g}, {beta:g}")
    if nu <= 0.0:
        raise DomainError(f"hyper-Bessel parameter nu must be positive, got {nu:g}")


def hyper_bessel_w(alpha: float, beta: float, nu: float, x: float, policy: SeriesEvalPolicy = DEFAULT_POLICY) -> float:
    """W_{alpha,beta,nu} as a function of its series argument s: sum_k coeff_k s^k.

    Callers evaluating the eigenfunction in t pass s = +-t**beta.
    """
    _check_hyper_bessel_params(alpha, beta, nu)
    policy.check_argument(x, "hyper_bessel_w")

    def terms() -> Iterator[float]:
        product = 1.0
        k = 0
        while True:
            yield product * power_over_gamma(x, k, beta * k + 1.0 - alpha + nu)
            k += 1
            product *= gamma_ratio(beta * k + 1.0 - alpha, beta * k + 1.0)

    return _sum_series(terms(), policy, "hyper_bessel_w")


def laguerre_coefficient(n: int, r: int) -> float:
    """n! / ((r!)^2 (n-r)!), exact below n = 20 and via log-Gamma above."""
    if n <= _EXACT_FACTORIAL_MAX:
        return math.comb(n, r) / math.factorial(r)
    return math.exp(log_gamma(n + 1.0) - 2.0 * log_gamma(r + 1.0) - log_gamma(n - r + 1.0))


def laguerre_poly(n: int, x: float, y: float) -> float:
    """Two-variable Laguerre polynomial L_n(x, y) = n! sum_r (-1)^r x^r y^(n-r) / ((r!)^2 (n-r)!)."""
    if n < 0 or n > 170:
        raise DomainError(f"laguerre_poly requires 0 <= n <= 170, got {n}")
    terms = [(-1.0) ** r * laguerre_coefficient(n, r) * x**r * y ** (n - r) for r in range(n + 1)]
    return math.fsum(terms)


def lower_l(n: int, x: float) -> float:
    """Lowering basis l_n(x) = (-x)^n / n!."""
    if n < 0:
        raise DomainError(f"lower_l requires n >= 0, got {n}")
    return power_over_gamma(-x, n, n + 1.0)
