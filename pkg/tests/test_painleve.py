import numpy as np
import pytest
from pydantic import ValidationError

from rmtlab.config import settings
from rmtlab.models.painleve import PainleveParams
from rmtlab.services.painleve_service import (
    equation_sides,
    linear_launch_slope,
    log_integral,
    quartic,
    residual,
    solution_from_coefficient,
    solve_sigma,
    tail_mismatch,
    to_frame,
)
from rmtlab.utils.errors import PreconditionError, RangeError

QUARTER = PainleveParams(alpha1=0.25, alpha2=0.25)


class TestParams:
    def test_admissibility(self):
        with pytest.raises(ValidationError):
            PainleveParams(alpha1=-0.6)
        with pytest.raises(ValidationError):
            PainleveParams(alpha1=-0.3, alpha2=-0.3)

    def test_sigma_zero(self):
        params = PainleveParams(alpha1=0.3, alpha2=0.2, beta1_im=0.1, beta2_im=0.3)
        # 2 a1 a2 - (b1 + b2)^2 / 2 with b = i * b_im
        assert params.sigma_zero == pytest.approx(2 * 0.3 * 0.2 + 0.5 * 0.4 ** 2)

    def test_thetas(self):
        params = PainleveParams(alpha1=0.3, alpha2=0.2, beta1_im=0.1, beta2_im=0.3)
        assert params.thetas == (-0.2 + 0.2j, 0.2 + 0.2j, 0.3 - 0.2j, -0.3 - 0.2j)

    def test_swap(self):
        params = PainleveParams(alpha1=0.3, alpha2=0.2, beta1_im=0.1)
        assert params.swapped() == PainleveParams(alpha1=0.2, alpha2=0.3, beta2_im=0.1)
        assert params.swapped().swapped() == params


class TestEquation:
    def test_quartic_at_zero(self):
        params = PainleveParams(alpha1=0.3, alpha2=0.2, beta1_im=0.1, beta2_im=0.3)
        b = 0.2
        assert quartic(params, 0.0) == pytest.approx(4 * (b ** 2 + 0.04) * (b ** 2 + 0.09))

    def test_constant_solution_for_zero_params(self):
        lhs, rhs = equation_sides(PainleveParams(), 1.0, 0.0, 0.0, 0.0)
        assert lhs == 0.0 and rhs == 0.0

    def test_launch_slope_vanishes_without_beta(self):
        assert linear_launch_slope(QUARTER) == pytest.approx(0.0, abs=1e-9)


class TestZeroSolution:
    def test_zero_parameters(self):
        sol = solve_sigma(PainleveParams(), 10.0)
        assert sol.dense is None
        assert log_integral(sol, 5.0) == 0.0
        np.testing.assert_array_equal(sol.sigma_at([1.0, 2.0]), [0.0, 0.0])
        assert list(to_frame(sol).columns) == ["x", "sigma", "dsigma"]

    def test_bad_range(self):
        with pytest.raises(PreconditionError):
            solve_sigma(QUARTER, 0.0)


class TestTrajectory:
    def test_fixed_coefficient_trajectory(self):
        sol = solution_from_coefficient(QUARTER, 0.0, 5.0)
        assert sol.sigma[0] == pytest.approx(QUARTER.sigma_zero, abs=1e-12)
        assert sol.x_max <= 5.0
        with pytest.raises(RangeError):
            log_integral(sol, 2 * sol.x_max)
        with pytest.raises(RangeError):
            log_integral(sol, -1.0)

    def test_log_integral_scale(self):
        sol = solution_from_coefficient(QUARTER, 0.0, 4.0)
        upper = min(1.0, 0.5 * sol.x_max)
        assert log_integral(sol, upper, scale=2.0) == pytest.approx(log_integral(sol, 2.0 * upper))

    def test_log_integral_scale_contract(self):
        sol = solution_from_coefficient(QUARTER, 0.0, 4.0)
        with pytest.raises(PreconditionError):
            log_integral(sol, 1.0, scale=3.0)
        upper = min(0.5, 0.25 * sol.x_max)
        assert log_integral(sol, upper, scale=4.0) == pytest.approx(log_integral(sol, 4.0 * upper))

    def test_head_integral_below_launch(self):
        sol = solution_from_coefficient(QUARTER, 0.0, 2.0)
        x0 = settings.painleve_x0
        assert abs(log_integral(sol, 0.5 * x0)) <= abs(log_integral(sol, x0)) + 1e-15


@pytest.mark.slow
class TestShooting:
    @pytest.fixture(scope="class")
    def quarter(self):
        return solve_sigma(QUARTER, 20.0)

    def test_residual(self, quarter):
        xs = np.linspace(1e-2, 20.0, 200)
        assert np.max(residual(quarter, xs)) < 1e-5

    def test_small_x_limit(self, quarter):
        assert quarter.sigma_at([1e-3])[0] == pytest.approx(QUARTER.sigma_zero, abs=1e-2)

    def test_large_x_slope(self, quarter):
        # beta1 = beta2 gives zero slope at infinity
        assert abs(quarter.dsigma_at([19.5])[0]) < 2e-2

    def test_local_exponent(self, quarter):
        assert quarter.local_exponent == pytest.approx(1 + 2 * (0.25 + 0.25), abs=0.1)

    def test_slope_with_beta_difference(self):
        params = PainleveParams(alpha1=0.25, alpha2=0.25, beta1_im=0.2, beta2_im=-0.2)
        sol = solve_sigma(params, 20.0)
        assert sol.dsigma_at([19.5])[0] == pytest.approx(params.half_diff_im, abs=2e-2)

    def test_swap_symmetry_without_beta(self):
        params = PainleveParams(alpha1=0.3, alpha2=0.1)
        a = solve_sigma(params, 10.0)
        b = solve_sigma(params.swapped(), 10.0)
        assert log_integral(a, 8.0) == pytest.approx(log_integral(b, 8.0), abs=1e-8)

    def test_tail_decays_onto_target(self, quarter):
        # sigma~ ~ (2 a1 a2 / x) cos(x + phase) around zero when beta1 = beta2 = 0
        xs = np.linspace(24.0, 36.0, 4000)
        envelope = np.max(np.abs(xs * quarter.sigma_at(xs)))
        assert envelope == pytest.approx(2 * 0.25 * 0.25, rel=0.2)
        assert tail_mismatch(QUARTER, quarter.dense, quarter.x_max) < 5e-3

    def test_horizon_not_requested_range(self, quarter):
        assert quarter.x_max >= settings.painleve_horizon
        longer = solve_sigma(QUARTER, 80.0)
        xs = np.array([2.0, 5.0, 10.0])
        np.testing.assert_allclose(longer.sigma_at(xs), quarter.sigma_at(xs), atol=3e-3)
