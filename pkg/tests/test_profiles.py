import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.errors import DomainError
from src.fracpoly import max_deviation
from src.numops import Grid1D
from src.profiles import (
    OPERATOR_FOR_PROFILE,
    PROFILE_FOR_OPERATOR,
    ProfileKind,
    TemporalProfile,
    TimeOperator,
    is_fractional,
)
from src.specfun import SeriesEvalPolicy

PROFILES = [
    TemporalProfile(kind=ProfileKind.EXPONENTIAL, r=1.5),
    TemporalProfile(kind=ProfileKind.TRICOMI, r=0.8),
    TemporalProfile(kind=ProfileKind.MITTAG_LEFFLER, r=1.0, alpha=0.5),
    TemporalProfile(kind=ProfileKind.MITTAG_LEFFLER, r=2.0, alpha=0.8),
    TemporalProfile(kind=ProfileKind.HYPER_BESSEL_W, r=1.0, alpha=0.5, beta=0.5, nu=1.0),
    TemporalProfile(kind=ProfileKind.HYPER_BESSEL_W, r=0.7, alpha=0.3, beta=0.7, nu=0.5),
]


def test_operator_and_profile_tables_are_inverse() -> None:
    assert len(PROFILE_FOR_OPERATOR) == len(TimeOperator)
    for op, kind in PROFILE_FOR_OPERATOR.items():
        assert OPERATOR_FOR_PROFILE[kind] is op


class TestValues:
    def test_known_values(self) -> None:
        assert TemporalProfile(kind=ProfileKind.EXPONENTIAL, r=2.0).value(0.5) == pytest.approx(math.exp(-1.0))
        tricomi = TemporalProfile(kind=ProfileKind.TRICOMI, r=1.0)
        assert tricomi.value(1.0) == pytest.approx(0.2238907791412357, rel=1e-12)
        ml = TemporalProfile(kind=ProfileKind.MITTAG_LEFFLER, r=1.0, alpha=0.5)
        assert ml.value(1.0) == pytest.approx(0.42758357615580705, rel=1e-12)

    @pytest.mark.parametrize("profile", PROFILES[:4], ids=lambda p: p.describe())
    def test_unit_at_origin(self, profile: TemporalProfile) -> None:
        assert profile.value(0.0) == pytest.approx(1.0, abs=1e-15)

    def test_hyper_bessel_origin_value(self) -> None:
        profile = PROFILES[5]
        assert profile.value(0.0) == pytest.approx(1.0 / math.gamma(1.0 - 0.3 + 0.5), rel=1e-13)

    @pytest.mark.parametrize("profile", PROFILES, ids=lambda p: p.describe())
    def test_rejects_negative_time(self, profile: TemporalProfile) -> None:
        with pytest.raises(DomainError):
            profile.value(-0.1)

    @pytest.mark.parametrize("profile", PROFILES, ids=lambda p: p.describe())
    def test_series_matches_values(self, profile: TemporalProfile) -> None:
        t = np.array([0.0, 0.3, 0.8, 1.5])
        np.testing.assert_allclose(profile.series(60).evaluate(t).real, profile.sample(t), atol=1e-12)

    def test_sample_keeps_shape(self) -> None:
        t = np.linspace(0.0, 1.0, 6).reshape(2, 3)
        assert PROFILES[0].sample(t).shape == (2, 3)

    def test_describe(self) -> None:
        assert PROFILES[0].describe() == "exp(-1.5 t)"
        assert PROFILES[2].describe() == "E_0.5(-1 t^0.5)"


class TestEigenContract:
    @pytest.mark.parametrize("profile", PROFILES, ids=lambda p: p.describe())
    def test_series(self, profile: TemporalProfile) -> None:
        s = profile.series(30)
        image = profile.apply_operator_series(s)
        assert max_deviation(image, s.truncate(29).scaled(-profile.r), relative=True) <= 1e-12

    @pytest.mark.parametrize("profile", PROFILES[:2], ids=lambda p: p.describe())
    def test_fd_integer_operators(self, profile: TemporalProfile) -> None:
        grid = Grid1D(start=0.0, stop=2.0, count=401)
        f = profile.sample(grid.nodes)
        image = profile.apply_operator_fd(f, grid)
        np.testing.assert_allclose(image[1:-1], -profile.r * f[1:-1], atol=5e-4)

    @pytest.mark.parametrize("r", [0.5, 1.0, 2.0])
    def test_tricomi_eigenvalue(self, r: float) -> None:
        profile = TemporalProfile(kind=ProfileKind.TRICOMI, r=r)
        s = profile.series(40)
        assert max_deviation(profile.apply_operator_series(s), s.truncate(39).scaled(-r), relative=True) <= 1e-13

        grid = Grid1D(start=0.0, stop=2.0, count=401)
        f = profile.sample(grid.nodes)
        image = profile.apply_operator_fd(f, grid)
        assert np.abs(image[1:-1] + r * f[1:-1]).max() <= 5e-4

    @pytest.mark.parametrize("profile", PROFILES[2:], ids=lambda p: p.describe())
    def test_fd_fractional_operators(self, profile: TemporalProfile) -> None:
        grid = Grid1D(start=0.0, stop=1.0, count=201)
        f = profile.sample(grid.nodes)
        image = profile.apply_operator_fd(f, grid)
        late = grid.nodes >= 0.25
        finite = np.isfinite(image)
        np.testing.assert_allclose(image[late & finite], -profile.r * f[late & finite], atol=2e-2)
        assert finite[late].sum() >= late.sum() - 2


WIDE_POLICY = SeriesEvalPolicy(max_terms=200)


def _error_at_one(profile: TemporalProfile, stop: float, count: int) -> float:
    grid = Grid1D(start=0.0, stop=stop, count=count)
    node = int(round((count - 1) / stop))
    f = profile.sample(grid.nodes, WIDE_POLICY)
    image = profile.apply_operator_fd(f, grid)
    return abs(image[node] + profile.r * f[node])


class TestRefinement:
    """Halving h must shrink the error at t = 1 by at least 0.9 * 2^order."""

    @pytest.mark.parametrize(
        "profile",
        [
            PROFILES[0],
            PROFILES[1],
            TemporalProfile(kind=ProfileKind.HYPER_BESSEL_W, r=1.0, alpha=1.0, beta=1.0, nu=1.0),
        ],
        ids=lambda p: p.describe(),
    )
    def test_central_differences_are_second_order(self, profile: TemporalProfile) -> None:
        coarse, fine = (_error_at_one(profile, 2.0, count) for count in (201, 401))
        assert coarse / fine >= 0.9 * 4.0

    @pytest.mark.parametrize("alpha", [0.3, 0.5, 0.9])
    def test_l1_order_on_mittag_leffler_profiles(self, alpha: float) -> None:
        # E_alpha(-t^alpha) ~ 1 - t^alpha / Gamma(1 + alpha) caps L1 at order 1 + alpha below alpha = 1/2
        order = min(2.0 - alpha, 1.0 + alpha)
        profile = TemporalProfile(kind=ProfileKind.MITTAG_LEFFLER, r=1.0, alpha=alpha)
        coarse, fine = (_error_at_one(profile, 1.0, count) for count in (201, 401))
        assert coarse / fine >= 0.9 * 2.0**order


class TestValidation:
    def test_rejects_non_positive_eigenvalue(self) -> None:
        with pytest.raises(ValidationError):
            TemporalProfile(kind=ProfileKind.TRICOMI, r=0.0)

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"kind": ProfileKind.MITTAG_LEFFLER, "alpha": 1.5},
            {"kind": ProfileKind.MITTAG_LEFFLER, "alpha": 0.0},
            {"kind": ProfileKind.HYPER_BESSEL_W, "alpha": 0.5, "beta": 0.0},
            {"kind": ProfileKind.HYPER_BESSEL_W, "alpha": 0.5, "beta": 0.5, "nu": -1.0},
        ],
    )
    def test_rejects_operator_parameters(self, kwargs: dict) -> None:
        with pytest.raises(ValidationError):
            TemporalProfile(r=1.0, **kwargs)

    def test_fractional_flag(self) -> None:
        assert not TemporalProfile(kind=ProfileKind.MITTAG_LEFFLER, r=1.0, alpha=1.0).fractional
        assert TemporalProfile(kind=ProfileKind.MITTAG_LEFFLER, r=1.0, alpha=0.5).fractional
        assert not is_fractional(TimeOperator.LAGUERRE, 0.5, 0.5)
        assert not is_fractional(TimeOperator.HYPER_BESSEL, 1.0, 1.0)
        assert is_fractional(TimeOperator.HYPER_BESSEL, 1.0, 0.5)
