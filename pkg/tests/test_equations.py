import math

import numpy as np
import pytest
from pydantic import ValidationError

from src.equations import (
    EquationSpec,
    Family,
    ParseMode,
    SolutionAnsatz,
    build_solution,
    dispersion,
)
from src.errors import BalanceError, DomainError
from src.numops import Grid1D
from src.profiles import ProfileKind, TimeOperator


class TestEquationSpec:
    @pytest.mark.parametrize(
        ("family", "operator"),
        [
            (Family.BURGERS_CLASSIC, TimeOperator.DERIVATIVE),
            (Family.BURGERS_LAGUERRE, TimeOperator.LAGUERRE),
            (Family.BURGERS_FRACTIONAL, TimeOperator.CAPUTO),
            (Family.BURGERS_HYPER_BESSEL, TimeOperator.HYPER_BESSEL),
            (Family.BURGERS_POWER_N, TimeOperator.LAGUERRE),
            (Family.KDV_LAGUERRE, TimeOperator.LAGUERRE),
            (Family.BURGERS_GENERAL_OT, TimeOperator.LAGUERRE),
            (Family.BURGERS_HIGH_ORDER, TimeOperator.LAGUERRE),
        ],
    )
    def test_resolved_operator(self, family: Family, operator: TimeOperator) -> None:
        assert EquationSpec(family=family).operator is operator

    def test_general_families_take_any_operator(self) -> None:
        eq = EquationSpec(family=Family.KDV_GENERAL_OT, time_operator=TimeOperator.CAPUTO, alpha=0.3)
        assert eq.operator is TimeOperator.CAPUTO
        assert eq.profile(1.0).kind is ProfileKind.MITTAG_LEFFLER

    def test_caputo_of_order_one_is_the_derivative(self) -> None:
        eq = EquationSpec(family=Family.BURGERS_FRACTIONAL, alpha=1.0)
        assert eq.operator is TimeOperator.DERIVATIVE
        assert eq.profile(2.0).kind is ProfileKind.EXPONENTIAL

    def test_fixed_operator_cannot_be_overridden(self) -> None:
        with pytest.raises(ValidationError):
            EquationSpec(family=Family.BURGERS_CLASSIC, time_operator=TimeOperator.CAPUTO)
        # naming the family's own operator is fine
        assert EquationSpec(family=Family.BURGERS_CLASSIC, time_operator=TimeOperator.DERIVATIVE)

    def test_power_n_needs_n_at_least_two(self) -> None:
        with pytest.raises(ValidationError):
            EquationSpec(family=Family.BURGERS_POWER_N, n=1)

    @pytest.mark.parametrize(
        "kwargs", [{"r": 1.0}, {"k": 1.0}, {"k": 0.0, "r": 1.0}, {"k": 1.0, "r": -1.0}]
    )
    def test_variable_coefficient_parameters(self, kwargs: dict) -> None:
        with pytest.raises(ValidationError):
            EquationSpec(family=Family.VAR_COEF_BURGERS, **kwargs)

    def test_operator_parameters_are_checked(self) -> None:
        with pytest.raises(ValidationError):
            EquationSpec(family=Family.BURGERS_FRACTIONAL, alpha=1.2)
        with pytest.raises(ValidationError):
            EquationSpec(family=Family.BURGERS_HYPER_BESSEL, nu=0.0)

    def test_unknown_fields_are_rejected(self) -> None:
        with pytest.raises(ValidationError):
            EquationSpec(family=Family.BURGERS_CLASSIC, gamma=2.0)

    def test_profile_needs_positive_eigenvalue(self) -> None:
        eq = EquationSpec(family=Family.BURGERS_LAGUERRE)
        with pytest.raises(DomainError):
            eq.profile(0.0)
        with pytest.raises(DomainError):
            eq.profile(-1.0)

    def test_spatial_order(self) -> None:
        assert EquationSpec(family=Family.BURGERS_CLASSIC).max_spatial_order == 2
        assert EquationSpec(family=Family.KDV_LAGUERRE).max_spatial_order == 3
        assert EquationSpec(family=Family.BURGERS_HIGH_ORDER).max_spatial_order == 3

    def test_params(self) -> None:
        assert EquationSpec(family=Family.BURGERS_LAGUERRE).params() == {"time_operator": "laguerre"}
        hb = EquationSpec(family=Family.BURGERS_HYPER_BESSEL, alpha=0.3, beta=0.7, nu=0.5).params()
        assert hb == {"time_operator": "hyper-bessel", "alpha": 0.3, "beta": 0.7, "nu": 0.5}
        power = EquationSpec(family=Family.BURGERS_POWER_N, n=3, parse_mode=ParseMode.PAPER_CONDITION).params()
        assert power["n"] == 3 and power["parse_mode"] == "paper_condition"


class TestDispersion:
    @pytest.mark.parametrize(
        ("eq", "k", "expected"),
        [
            (EquationSpec(family=Family.BURGERS_CLASSIC), 1.0, 1.0),
            (EquationSpec(family=Family.BURGERS_LAGUERRE), 1.5, 2.25),
            (EquationSpec(family=Family.BURGERS_FRACTIONAL, alpha=0.5), -2.0, 4.0),
            (EquationSpec(family=Family.BURGERS_HIGH_ORDER), 3.0, 9.0),
            (EquationSpec(family=Family.KDV_LAGUERRE), 2.0, 8.0),
            (EquationSpec(family=Family.KDV_GENERAL_OT, time_operator=TimeOperator.DERIVATIVE), 0.5, 0.125),
            (EquationSpec(family=Family.BURGERS_POWER_N, n=2), 1.0, 3.0),
            (EquationSpec(family=Family.BURGERS_POWER_N, n=2, parse_mode=ParseMode.PAPER_CONDITION), 1.0, 1.0),
            (EquationSpec(family=Family.BURGERS_POWER_N, n=3), 1.0, 7.0),
            (EquationSpec(family=Family.VAR_COEF_BURGERS, k=0.7, r=0.4), 0.7, 0.4),
        ],
    )
    def test_closed_form(self, eq: EquationSpec, k: float, expected: float) -> None:
        assert dispersion(eq, k) == pytest.approx(expected, rel=1e-15)

    def test_zero_wave_number(self) -> None:
        with pytest.raises(DomainError):
            dispersion(EquationSpec(family=Family.BURGERS_CLASSIC), 0.0)


class TestBuildSolution:
    def test_laguerre_solution(self) -> None:
        ansatz = build_solution(EquationSpec(family=Family.BURGERS_LAGUERRE), 2.0, 1.0)
        assert ansatz.r == 1.0
        assert ansatz.profile.kind is ProfileKind.TRICOMI
        assert ansatz.value(0.0, 1.0) == pytest.approx(2.0 * 0.2238907791412357, rel=1e-12)
        assert ansatz.value(0.5, 0.0) == pytest.approx(2.0 * math.exp(0.5), rel=1e-14)

    def test_force_r(self) -> None:
        ansatz = build_solution(EquationSpec(family=Family.BURGERS_CLASSIC), 1.0, 1.0, force_r=2.0)
        assert ansatz.r == 2.0

    def test_negative_dispersion_has_no_profile(self) -> None:
        eq = EquationSpec(family=Family.BURGERS_POWER_N, n=2, parse_mode=ParseMode.PAPER_CONDITION)
        # 2k^3 - k^2 < 0 for k = 0.25
        with pytest.raises(DomainError):
            build_solution(eq, 1.0, 0.25)

    @pytest.mark.parametrize(("R", "k"), [(0.0, 1.0), (1.0, 0.0)])
    def test_rejects_degenerate_ansatz(self, R: float, k: float) -> None:
        with pytest.raises(DomainError):
            build_solution(EquationSpec(family=Family.BURGERS_CLASSIC), R, k)

    def test_variable_coefficient_balance(self) -> None:
        eq = EquationSpec(family=Family.VAR_COEF_BURGERS, k=1.0, r=0.5)
        assert build_solution(eq, 1.0, 1.0).r == 0.5
        with pytest.raises(BalanceError):
            build_solution(eq, 2.0, 1.0)
        with pytest.raises(BalanceError):
            build_solution(eq, 1.0, 2.0)

    def test_balance_error_is_a_domain_error(self) -> None:
        eq = EquationSpec(family=Family.VAR_COEF_GENERAL_OT, k=1.0, r=0.5)
        with pytest.raises(DomainError):
            build_solution(eq, -1.0, 1.0)


class TestSolutionAnsatz:
    @pytest.fixture
    def ansatz(self) -> SolutionAnsatz:
        return build_solution(EquationSpec(family=Family.BURGERS_FRACTIONAL, alpha=0.5), 1.5, -0.8)

    def test_sample_is_an_outer_product(self, ansatz: SolutionAnsatz) -> None:
        x = np.array([0.0, 0.5, 1.0])
        t = np.array([0.0, 0.25, 0.5, 1.0])
        samples = ansatz.sample(x, t)
        assert samples.shape == (3, 4)
        assert samples[2, 3] == pytest.approx(ansatz.value(1.0, 1.0), rel=1e-14)
        np.testing.assert_allclose(samples[:, 0], 1.5 * np.exp(-0.8 * x), rtol=1e-14)

    def test_on_grid(self, ansatz: SolutionAnsatz) -> None:
        grid_x = Grid1D(start=0.0, stop=1.0, count=11)
        grid_t = Grid1D(start=0.0, stop=2.0, count=21)
        sampled = ansatz.on_grid(grid_x, grid_t)
        assert sampled.values.shape == (11, 21)
        assert sampled.valid.all()
