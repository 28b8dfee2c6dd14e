"""Identity suite: operator and polynomial identities checked coefficient by coefficient.

Each block reports pass, warn or fail. A block warns when magnitudes agree
but the coefficients differ by the known branch factor exp(2 i pi beta) of
the fractional Laguerre identities.
"""

import cmath
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import StrEnum
from functools import partial
from pathlib import Path

from pydantic import BaseModel

from .errors import ConfigError, LaguerreError
from .fracpoly import (
    PhasedPowerSeries,
    caputo,
    compare_phased,
    differentiate,
    exp_laguerre,
    frac_laguerre_op,
    hyper_bessel_op,
    l_alpha_nu_series,
    laguerre_derivative,
    laguerre_poly_series,
    laguerre_power,
    laguerre_power_direct,
    lower_l_series,
    max_deviation,
    tilde_l_series,
    tricomi_series,
)
from .logging_config import get_logger
from .metrics import identity_checks_total
from .profiles import ProfileKind, TemporalProfile
from .specfun import gamma_ratio, hyper_bessel_w_coefficient, laguerre_poly, tricomi_c0

logger = get_logger(__name__)

FRACTIONAL_TRIPLES = ((0.5, 0.5, 0.7), (0.3, 0.6, 1.2))
HYPER_BESSEL_TRIPLES = ((0.5, 0.5, 1.0), (0.3, 0.7, 0.5), (0.8, 0.4, 2.0))
GENERATING_POINTS = ((0.5, 1.0, 0.3), (1.0, 0.5, 0.7), (2.0, -1.0, 0.4))
PHASE_ATOL = 1e-12
GOLDEN_TOLERANCE = 1e-12


class BlockStatus(StrEnum):
    PASS = "pass"
    WARN = "warn"
    FAIL = "fail"


@dataclass
class _Outcome:
    deviation: float = 0.0
    checks: int = 0
    # (observed, expected) phase factors of identities holding up to a branch factor
    phases: list[tuple[complex, complex]] = field(default_factory=list)

    def add(self, deviation: float) -> None:
        self.deviation = max(self.deviation, deviation)
        self.checks += 1


class IdentityBlock(BaseModel):
    name: str
    status: BlockStatus
    checks: int
    max_deviation: float
    tolerance: float
    phase_factor: tuple[float, float] | None = None
    error: str | None = None

    def to_text(self) -> str:
        line = f"{self.name:<24} {self.status:<4}  max_dev={self.max_deviation:.3g}  tol={self.tolerance:g}"
        if self.phase_factor is not None:
            line += f"  phase={self.phase_factor[0]:.15g}{self.phase_factor[1]:+.15g}i"
        if self.error:
            line += f"  error={self.error}"
        return line


class SuiteReport(BaseModel):
    status: BlockStatus
    blocks: list[IdentityBlock]

    def to_text(self) -> str:
        return "\n".join([*(block.to_text() for block in self.blocks), f"overall {self.status}"])


def _eigenvalue() -> _Outcome:
    outcome = _Outcome()
    for lam in (0.5, 1.0, 2.0):
        image = laguerre_derivative(tricomi_series(lam, 40))
        outcome.add(max_deviation(image, tricomi_series(lam, 39).scaled(lam), relative=True))
    return outcome


def _lowering() -> _Outcome:
    outcome = _Outcome()
    for n in range(11):
        for m in range(1, n + 1):
            expected = lower_l_series(n - m).scaled(math.factorial(n) / math.factorial(n - m))
            outcome.add(max_deviation(laguerre_power(lower_l_series(n), m), expected, relative=True))
    return outcome


def _two_variable_lowering() -> _Outcome:
    outcome = _Outcome()
    for y in (0.5, 1.0, 2.0):
        for n in range(1, 11):
            expected = laguerre_poly_series(n - 1, y).scaled(n)
            outcome.add(max_deviation(laguerre_derivative(laguerre_poly_series(n, y)), expected, relative=True))
    return outcome


def _operator_power() -> _Outcome:
    outcome = _Outcome()
    for m in range(1, 5):
        for p in range(1, 9):
            s = PhasedPowerSeries.monomial(float(p))
            outcome.add(max_deviation(laguerre_power(s, m), laguerre_power_direct(s, m), relative=True))
    return outcome


def _generating_function() -> _Outcome:
    outcome = _Outcome()
    for x, y, t in GENERATING_POINTS:
        partial = math.fsum(t**n / math.factorial(n) * laguerre_poly(n, x, y) for n in range(60))
        expected = math.exp(y * t) * tricomi_c0(x * t)
        outcome.add(abs(partial - expected) / max(1.0, abs(expected)))
    return outcome


def _operational_definition() -> _Outcome:
    outcome = _Outcome()
    for y in (0.5, 1.0, 2.0):
        for n in range(11):
            outcome.add(max_deviation(exp_laguerre(n, y), laguerre_poly_series(n, y), relative=True))
    return outcome


def _hyper_bessel_eigen() -> _Outcome:
    outcome = _Outcome()
    for alpha, beta, nu in HYPER_BESSEL_TRIPLES:
        for k in range(1, 21):
            term = PhasedPowerSeries.monomial(beta * k, hyper_bessel_w_coefficient(k, alpha, beta, nu))
            expected = PhasedPowerSeries.monomial(beta * (k - 1), hyper_bessel_w_coefficient(k - 1, alpha, beta, nu))
            outcome.add(max_deviation(hyper_bessel_op(term, alpha, beta, nu), expected, relative=True))
    return outcome


def _profile_eigen() -> _Outcome:
    profiles = [
        TemporalProfile(kind=ProfileKind.EXPONENTIAL, r=1.0),
        TemporalProfile(kind=ProfileKind.TRICOMI, r=2.0),
        *(
            TemporalProfile(kind=ProfileKind.MITTAG_LEFFLER, r=r, alpha=alpha)
            for alpha in (0.3, 0.5, 0.9)
            for r in (0.5, 1.0)
        ),
        *(
            TemporalProfile(kind=ProfileKind.HYPER_BESSEL_W, r=0.25, alpha=a, beta=b, nu=v)
            for a, b, v in HYPER_BESSEL_TRIPLES
        ),
    ]
    outcome = _Outcome()
    for profile in profiles:
        image = profile.apply_operator_series(profile.series(40))
        outcome.add(max_deviation(image, profile.series(39).scaled(-profile.r), relative=True))
    return outcome


def _degeneration() -> _Outcome:
    samples = [
        lower_l_series(5),
        tricomi_series(1.0, 12),
        PhasedPowerSeries.from_terms([(1.0, 0.5), (2.0, 1.5), (-1.0, 3.0)]),
    ]
    outcome = _Outcome()
    for s in samples:
        outcome.add(max_deviation(caputo(s, 1.0), differentiate(s), relative=True))
        outcome.add(max_deviation(frac_laguerre_op(s, 1.0, 1.0, 1.0), laguerre_derivative(s), relative=True))
    return outcome


def _record_phased(outcome: _Outcome, actual: PhasedPowerSeries, expected: PhasedPowerSeries, beta: float) -> None:
    comparison = compare_phased(actual, expected)
    outcome.add(comparison.magnitude_deviation + comparison.unmatched_terms + comparison.phase_spread)
    outcome.phases.append((comparison.phase_factor, cmath.exp(2j * math.pi * beta)))


def _fractional_lowering() -> _Outcome:
    outcome = _Outcome()
    for alpha, beta, nu in FRACTIONAL_TRIPLES:
        for n in range(1, 7):
            actual = frac_laguerre_op(l_alpha_nu_series(n, alpha, nu), alpha, beta, nu)
            expected = l_alpha_nu_series(n - beta, alpha, nu).scaled(gamma_ratio(n + 1.0, n - alpha + 1.0))
            _record_phased(outcome, actual, expected, beta)
    # beta = nu = alpha reduces to the real-index lowering of l_n
    for alpha in (0.3, 0.5):
        for n in range(1, 7):
            actual = frac_laguerre_op(lower_l_series(n), alpha, alpha, alpha)
            expected = lower_l_series(n - alpha).scaled(gamma_ratio(n + 1.0, n - alpha + 1.0))
            _record_phased(outcome, actual, expected, alpha)
    return outcome


def _tilde_lowering() -> _Outcome:
    outcome = _Outcome()
    for alpha, beta, nu in FRACTIONAL_TRIPLES:
        for n in range(1, 7):
            actual = frac_laguerre_op(tilde_l_series(n, alpha, beta, nu), alpha, beta, nu)
            _record_phased(outcome, actual, tilde_l_series(n - 1, alpha, beta, nu), beta)
    return outcome


# operator images stored as text for regression against earlier runs
GOLDEN_IMAGES: dict[str, Callable[[], PhasedPowerSeries]] = {
    "laguerre_tricomi": lambda: laguerre_derivative(tricomi_series(1.0, 20)),
    "laguerre_squared_l6": lambda: laguerre_power(lower_l_series(6), 2),
    "laguerre_poly_5": lambda: laguerre_derivative(laguerre_poly_series(5, 1.0)),
    "caputo_mittag_leffler": lambda: caputo(
        TemporalProfile(kind=ProfileKind.MITTAG_LEFFLER, r=1.0, alpha=0.5).series(20), 0.5
    ),
    "hyper_bessel_w": lambda: hyper_bessel_op(
        TemporalProfile(kind=ProfileKind.HYPER_BESSEL_W, r=1.0, alpha=0.5, beta=0.5, nu=1.0).series(20),
        0.5,
        0.5,
        1.0,
    ),
    "fractional_l": lambda: frac_laguerre_op(l_alpha_nu_series(3, 0.5, 0.7), 0.5, 0.5, 0.7),
    "fractional_tilde_l": lambda: frac_laguerre_op(tilde_l_series(3, 0.5, 0.5, 0.7), 0.5, 0.5, 0.7),
}


def golden_path(directory: Path, name: str) -> Path:
    return directory / f"{name}.txt"


def _golden(directory: Path, update: bool) -> _Outcome:
    """Compare GOLDEN_IMAGES with the stored text images, or rewrite them when update is set.

    Raises:
        ConfigError: a stored image is missing or unreadable
    """
    outcome = _Outcome()
    if update:
        directory.mkdir(parents=True, exist_ok=True)
    for name, image in GOLDEN_IMAGES.items():
        actual = image()
        path = golden_path(directory, name)
        if update:
            path.write_text(f"# {name}\n{actual.to_text()}")
            outcome.add(0.0)
            continue
        if not path.is_file():
            raise ConfigError(f"golden image missing: {path}")
        try:
            stored = PhasedPowerSeries.from_text(path.read_text())
        except ValueError as e:
            raise ConfigError(f"{path}: {e}") from e
        outcome.add(max_deviation(actual, stored, relative=True))
    if update:
        logger.info("Golden images written", directory=str(directory), images=len(GOLDEN_IMAGES))
    return outcome


BLOCKS: tuple[tuple[str, float, Callable[[], _Outcome]], ...] = (
    ("eigenvalue", 1e-13, _eigenvalue),
    ("lowering", 1e-12, _lowering),
    ("two_variable_lowering", 1e-12, _two_variable_lowering),
    ("operator_power", 1e-12, _operator_power),
    ("generating_function", 1e-10, _generating_function),
    ("operational_definition", 1e-12, _operational_definition),
    ("hyper_bessel_eigen", 1e-12, _hyper_bessel_eigen),
    ("profile_eigen", 1e-12, _profile_eigen),
    ("degeneration", 1e-13, _degeneration),
    ("fractional_lowering", 1e-12, _fractional_lowering),
    ("tilde_lowering", 1e-12, _tilde_lowering),
)


def _grade(name: str, tolerance: float, outcome: _Outcome) -> IdentityBlock:
    status = BlockStatus.PASS if outcome.deviation <= tolerance else BlockStatus.FAIL
    phase_factor = None
    if outcome.phases and status is BlockStatus.PASS:
        mismatched = [(obs, exp) for obs, exp in outcome.phases if abs(obs - 1.0) > PHASE_ATOL]
        if any(abs(obs - exp) > PHASE_ATOL for obs, exp in mismatched):
            status = BlockStatus.FAIL
        elif mismatched:
            status = BlockStatus.WARN
        if mismatched:
            observed = mismatched[0][0]
            phase_factor = (observed.real, observed.imag)
    return IdentityBlock(
        name=name,
        status=status,
        checks=outcome.checks,
        max_deviation=outcome.deviation,
        tolerance=tolerance,
        phase_factor=phase_factor,
    )


def run_identity_suite(golden_dir: Path | None = None, update_golden: bool = False) -> SuiteReport:
    """Run every identity block.

    Args:
        golden_dir: Directory of stored operator images; adds a "golden" block when set
        update_golden: Rewrite the stored images instead of comparing against them

    Returns:
        Suite report; the overall status is the worst block status
    """
    checks = list(BLOCKS)
    if golden_dir is not None:
        checks.append(("golden", GOLDEN_TOLERANCE, partial(_golden, golden_dir, update_golden)))
    blocks: list[IdentityBlock] = []
    for name, tolerance, check in checks:
        try:
            block = _grade(name, tolerance, check())
        except LaguerreError as e:
            block = IdentityBlock(
                name=name, status=BlockStatus.FAIL, checks=0, max_deviation=math.inf, tolerance=tolerance, error=str(e)
            )
            logger.error("Identity block raised", block=name, error=str(e))
        if block.status is BlockStatus.WARN:
            logger.warning("Identity holds up to a phase factor", block=name, phase_factor=block.phase_factor)
        identity_checks_total.labels(block=name, status=str(block.status)).inc()
        blocks.append(block)

    statuses = {block.status for block in blocks}
    if BlockStatus.FAIL in statuses:
        overall = BlockStatus.FAIL
    elif BlockStatus.WARN in statuses:
        overall = BlockStatus.WARN
    else:
        overall = BlockStatus.PASS
    return SuiteReport(status=overall, blocks=blocks)
