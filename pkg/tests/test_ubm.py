import math

import numpy as np
import pytest
from scipy import stats

from rmtlab.config import settings
from rmtlab.models.charpoly import FieldGrid
from rmtlab.services.gmc_service import uniform_grid
from rmtlab.services.ubm_service import (
    dyson_simulate,
    dyson_simulate_many,
    expected_log_charpoly_norm,
    log_charpoly_path_norm,
    ou_simulate,
    sobolev_from_modes,
    sobolev_norm,
    spohn_linear_statistic,
    two_time_cov,
    z_covariance,
)
from rmtlab.utils.errors import DomainError, PreconditionError, StepError


class TestTwoTimeCovariance:
    def test_equal_times(self):
        assert two_time_cov(5, 3, 0.0) == 3.0
        assert two_time_cov(2, 7, 0.0) == 2.0

    def test_closed_form(self):
        assert two_time_cov(2, 1, 1.0) == pytest.approx(math.exp(-1.0))

    def test_continuous_at_zero(self):
        assert two_time_cov(4, 2, 1e-9) == pytest.approx(2.0, rel=1e-6)

    def test_preconditions(self):
        with pytest.raises(PreconditionError):
            two_time_cov(3, 0, 1.0)
        with pytest.raises(PreconditionError):
            two_time_cov(3, 1, -1.0)


class TestDyson:
    def test_single_angle_is_brownian(self, rng):
        paths = dyson_simulate_many(1, 1.0, 0.1, rng, 2000, initial=[0.0])
        final = np.array([p.angles[-1, 0] for p in paths])
        assert np.var(final) == pytest.approx(2.0, rel=0.15)

    def test_time_rescale_halves_the_clock(self, rng):
        paths = dyson_simulate_many(1, 1.0, 0.1, rng, 2000, initial=[0.0], time_rescale=True)
        final = np.array([p.angles[-1, 0] for p in paths])
        assert np.var(final) == pytest.approx(1.0, rel=0.15)

    def test_order_is_preserved(self, rng):
        path = dyson_simulate(6, 1.0, 0.01, rng)
        angles = np.asarray(path.angles)
        assert angles.shape == (101, 6)
        assert np.all(np.diff(angles, axis=1) > 0)
        assert np.all(angles[:, -1] - angles[:, 0] < 2 * math.pi)

    def test_frame(self, rng):
        frame = dyson_simulate(3, 0.1, 0.05, rng).to_frame()
        assert list(frame.columns) == ["t", "theta_1", "theta_2", "theta_3"]
        assert len(frame) == 3

    def test_step_cap(self, rng, monkeypatch):
        monkeypatch.setattr(settings, "dyson_max_halvings", 1)
        with pytest.raises(StepError):
            dyson_simulate(8, 10.0, 10.0, rng)

    def test_preconditions(self, rng):
        with pytest.raises(PreconditionError):
            dyson_simulate(3, 1.0, 0.0, rng)
        with pytest.raises(PreconditionError):
            dyson_simulate(3, 1.0, 0.1, rng, initial=[0.0, 1.0])

    def test_linear_statistic(self, rng):
        path = dyson_simulate(4, 0.2, 0.1, rng)
        assert spohn_linear_statistic(path, {1: 1.0}, 2) == pytest.approx(path.traces(1)[2])
        with pytest.raises(PreconditionError):
            spohn_linear_statistic(path, {0: 1.0, 1: 1.0}, 0)

    @pytest.mark.slow
    def test_two_time_covariance_monte_carlo(self, rng):
        paths = dyson_simulate_many(3, 0.5, 0.005, rng, 400)
        values = np.array([(p.traces(1)[-1] * np.conj(p.traces(1)[0])).real for p in paths])
        se = values.std(ddof=1) / math.sqrt(values.size)
        assert abs(values.mean() - two_time_cov(3, 1, 0.5)) < 4 * se

    @pytest.mark.slow
    @pytest.mark.parametrize("n", [2, 8])
    @pytest.mark.parametrize("k", [1, 2])
    @pytest.mark.parametrize("t", [0.1, 1.0])
    def test_two_time_covariance_grid(self, rng, n, k, t):
        paths = dyson_simulate_many(n, t, 0.005, rng, 400)
        values = np.array([(p.traces(k)[-1] * np.conj(p.traces(k)[0])).real for p in paths])
        se = values.std(ddof=1) / math.sqrt(values.size)
        assert abs(values.mean() - two_time_cov(n, k, t)) < 4 * se

    @pytest.mark.slow
    def test_haar_law_is_stationary(self, rng):
        paths = dyson_simulate_many(8, 1.0, 0.01, rng, 400)
        picks = rng.integers(0, 8, size=len(paths))
        angles = np.mod([p.angles[-1, j] for p, j in zip(paths, picks)], 2 * math.pi)
        assert stats.kstest(angles, "uniform", args=(0.0, 2 * math.pi)).pvalue > 1e-3

    @pytest.mark.slow
    @pytest.mark.parametrize("k", [1, 3, 8, 11])
    def test_time_averaged_trace_moment(self, rng, k):
        paths = dyson_simulate_many(8, 2.0, 0.01, rng, 200)
        averages = np.array([np.mean(np.abs(p.traces(k)) ** 2) for p in paths])
        se = averages.std(ddof=1) / math.sqrt(averages.size)
        assert abs(averages.mean() - min(k, 8)) < 4 * se


class TestOrnsteinUhlenbeck:
    def test_stationary_variance(self, rng):
        path = ou_simulate(3, 4000.0, 1.0, rng)
        coefficients = np.asarray(path.coefficients)
        for k in (1, 2, 3):
            assert np.var(coefficients[:, k - 1].real) == pytest.approx(1.0 / (2 * k), rel=0.15)

    def test_field_shape(self, rng):
        path = ou_simulate(4, 1.0, 0.25, rng)
        assert path.field(uniform_grid(16)).shape == (5, 16)

    def test_covariance_kernel(self):
        exact = z_covariance(0.2, 0.3, 0.7, 1.9)
        assert exact == pytest.approx(z_covariance(0.2, 0.3, 0.7, 1.9, k_max=2000), rel=1e-10)
        with pytest.raises(DomainError):
            z_covariance(0.5, 1.0, 0.5, 1.0)


class TestSobolev:
    @pytest.fixture
    def rotating(self):
        theta = uniform_grid(16)
        times = np.linspace(0.0, 1.0, 11)
        values = np.tile(np.exp(1j * theta), (times.size, 1))
        return FieldGrid(theta=theta, values=values, times=times)

    @pytest.mark.parametrize("s", [0.0, 0.3, 0.7])
    def test_constant_in_time(self, rotating, s):
        assert sobolev_norm(rotating, s, 1.0) == pytest.approx(1.0)

    def test_time_window(self, rotating):
        assert sobolev_norm(rotating, 0.0, 1.0, T=0.5) == pytest.approx(0.5)

    def test_domain(self, rotating):
        with pytest.raises(DomainError):
            sobolev_norm(rotating, 1.0, 1.0)
        with pytest.raises(DomainError):
            sobolev_from_modes([0.0, 1.0], np.ones((2, 1)), [1], 0.0, 0.0)
        with pytest.raises(PreconditionError):
            sobolev_norm(FieldGrid(theta=rotating.theta, values=rotating.values[0]), 0.0, 1.0)

    def test_expected_norm(self):
        assert expected_log_charpoly_norm(2, 0.5, 2.0, 3) == pytest.approx(2.0 * (1 + 2 / 8 + 2 / 27))

    @pytest.mark.slow
    def test_log_charpoly_norm_mean(self, rng):
        paths = dyson_simulate_many(4, 1.0, 0.01, rng, 200)
        norms = np.array([log_charpoly_path_norm(p, 0.5, 0.0, 8) for p in paths])
        se = norms.std(ddof=1) / math.sqrt(norms.size)
        assert abs(norms.mean() - expected_log_charpoly_norm(4, 0.5, 1.0, 8)) < 4 * se
