import math

import numpy as np
import pytest
from scipy import integrate

from rmtlab.models.detkit import FHSymbol, Singularity
from rmtlab.models.ensembles import Group, GroupKind
from rmtlab.models.gmc import Normalization, ShiftSign
from rmtlab.services.asymptotics_service import one_point_unitary
from rmtlab.services.charpoly_service import field_on_grid
from rmtlab.services.detkit_service import single_singularity, toeplitz_det
from rmtlab.services.ensemble_service import sample
from rmtlab.services.gmc_service import (
    cov_y,
    draw_field,
    expected_field,
    extend_field,
    mass_growth,
    mass_moment,
    restriction_mask,
    rm_gmc,
    sample_field,
    shift_field,
    truncated_covariance,
    truncated_gmc,
    uniform_grid,
)
from rmtlab.services.mom_service import fyodorov_bouchaud
from rmtlab.utils.errors import PoleError, PreconditionError

U4 = Group(kind=GroupKind.U, n=4)


class TestFields:
    def test_restriction_mask(self):
        grid = [0.0, 0.5, math.pi / 2, math.pi, math.pi + 0.005, 4.0, 2 * math.pi - 0.001]
        mask = restriction_mask(grid, 0.01)
        assert mask.tolist() == [False, True, True, False, False, True, False]

    @pytest.mark.parametrize("sign, expected", [
        (ShiftSign.NONE, 0.0),
        (ShiftSign.ORTHOGONAL, 0.75),
        (ShiftSign.SYMPLECTIC, -0.75),
    ])
    def test_shift_at_zero(self, sign, expected):
        x, x_hat = shift_field(4, [0.0], sign)
        assert x[0] == pytest.approx(expected)
        assert x_hat[0] == pytest.approx(0.0)

    def test_extend_keeps_prefix(self, rng):
        field = draw_field(8, rng, ShiftSign.ORTHOGONAL)
        longer = extend_field(field, 20, rng)
        assert longer.k == 20 and longer.shift == ShiftSign.ORTHOGONAL
        np.testing.assert_array_equal(longer.coefficients[:8], field.coefficients)
        with pytest.raises(PreconditionError):
            extend_field(longer, 10, rng)
        with pytest.raises(PreconditionError):
            draw_field(0, rng)

    def test_sample_shapes(self, rng):
        grid = uniform_grid(64)
        fs = sample_field(16, rng, grid, ShiftSign.SYMPLECTIC)
        assert fs.X.shape == fs.X_hat.shape == fs.x.shape == (64,)
        np.testing.assert_allclose(fs.y(0.5), fs.X)

    def test_truncated_variance_is_harmonic(self):
        k, alpha = 10, 0.3
        harmonic = sum(1.0 / j for j in range(1, k + 1))
        assert truncated_covariance(alpha, 0.0, 0.0, 0.0, k) == pytest.approx(4 * alpha ** 2 * harmonic)

    def test_closed_form_covariance(self):
        alpha, b, t1, t2 = 0.3, 0.2, 0.7, 2.1
        exact = cov_y(alpha, b, t1, t2)
        assert exact.imag == pytest.approx(0.0, abs=1e-12)
        assert exact.real == pytest.approx(truncated_covariance(alpha, b, t1, t2, 1_000_000), abs=1e-4)

    def test_covariance_poles(self):
        with pytest.raises(PoleError):
            cov_y(0.3, 0.0, 1.0, 1.0)
        with pytest.raises(PoleError):
            cov_y(0.3, 0.0, 1.0, 2 * math.pi - 1.0)


class TestMeasures:
    def test_zero_parameters(self, rng):
        fs = sample_field(4, rng, uniform_grid(16))
        mu = truncated_gmc(fs, 0.0)
        assert mu.total_mass() == pytest.approx(2 * math.pi)

    def test_truncated_mass_has_unit_mean(self, rng):
        grid = uniform_grid(128)
        measures = [truncated_gmc(sample_field(32, rng, grid), 0.3) for _ in range(400)]
        mean, se = mass_moment(measures, 1)
        assert abs(mean - 1.0) < 4 * se

    def test_restricted_mass_is_smaller(self, rng):
        grid = uniform_grid(128)
        mu = truncated_gmc(sample_field(16, rng, grid), 0.3)
        assert mu.total_mass(restriction_mask(grid, 0.1)) < mu.total_mass()

    def test_unitary_normalization(self):
        grid = uniform_grid(8)
        expected = expected_field(U4, 0.5, 0.0, grid, Normalization.DETERMINANT)
        np.testing.assert_allclose(expected, math.exp(one_point_unitary(4, 0.5)), rtol=1e-8)

    def test_random_matrix_mass_has_unit_mean(self, rng):
        grid = uniform_grid(32)
        expected = expected_field(U4, 0.5, 0.0, grid, Normalization.DETERMINANT)
        measures = [rm_gmc(U4, 0.5, 0.0, grid, Normalization.DETERMINANT, rng, expected=expected)
                    for _ in range(400)]
        mean, se = mass_moment(measures, 1)
        assert abs(mean - 1.0) < 4 * se

    def test_monte_carlo_normalization_needs_rng(self):
        with pytest.raises(PreconditionError):
            expected_field(U4, 0.5, 0.0, uniform_grid(8), Normalization.MC)

    def test_preconditions(self, rng):
        with pytest.raises(PreconditionError):
            mass_moment([], 1)
        with pytest.raises(PreconditionError):
            rm_gmc(U4, -0.6, 0.0, uniform_grid(8), Normalization.DETERMINANT, rng)

    def test_growth_rows(self, rng):
        rows = mass_growth(0.3, 2, [4, 8], 20, uniform_grid(32), rng)
        assert [k for k, _, _ in rows] == [4, 8]
        assert all(est > 0 and se >= 0 for _, est, se in rows)


class TestOracles:
    def test_covariance_against_smoothed_series(self):
        alpha, b = 0.3, 0.2
        big_k = 100_000
        js = np.arange(1, 2 * big_k)
        # averaged partial sums S_K .. S_{2K-1}; the tail error falls to O(1 / K^2)
        weights = np.minimum(1.0, (2 * big_k - js) / big_k)
        for t1 in np.linspace(0.5, 2.8, 20):
            t2 = 0.5 * t1 + 0.1
            left = 2 * alpha * np.cos(js * t1) + 2 * b * np.sin(js * t1)
            right = 2 * alpha * np.cos(js * t2) + 2 * b * np.sin(js * t2)
            series = float(np.sum(weights * left * right / js))
            exact = cov_y(alpha, b, t1, t2)
            assert exact.real == pytest.approx(series, abs=1e-6)
            assert exact.imag == pytest.approx(0.0, abs=1e-12)

    @pytest.mark.parametrize("alpha", [-0.3, 0.3, 0.8])
    def test_one_angle_normalization_by_quadrature(self, alpha):
        u1 = Group(kind=GroupKind.U, n=1)
        exact, _ = integrate.quad(lambda x: abs(2 * math.sin(0.5 * x)) ** (2 * alpha) / (2 * math.pi),
                                  0.0, 2 * math.pi, limit=200)
        assert expected_field(u1, alpha, 0.0, [0.0], Normalization.DETERMINANT)[0] == pytest.approx(exact, rel=1e-8)

    def test_one_angle_measure_has_unit_mass(self, rng):
        # with one eigenvalue the mass is the deterministic integral of |1 - e^{i(theta - phi)}|^{2 alpha}
        u1 = Group(kind=GroupKind.U, n=1)
        grid = uniform_grid(2048)
        for _ in range(5):
            mu = rm_gmc(u1, 0.3, 0.0, grid, Normalization.DETERMINANT, rng)
            assert mu.total_mass() / (2 * math.pi) == pytest.approx(1.0, rel=1e-3)

    def test_two_point_ratio(self):
        n, alpha, t1, t2 = 48, 0.4, 0.0, 1.5
        pair = FHSymbol(singularities=[Singularity(theta=t1, alpha=alpha), Singularity(theta=t2, alpha=alpha)])
        one = toeplitz_det(single_singularity(t1, alpha), n).value.real
        ratio = toeplitz_det(pair, n).value.real / one ** 2
        assert ratio == pytest.approx(abs(2 * math.sin(0.5 * (t2 - t1))) ** (-2 * alpha ** 2), rel=0.1)

    def test_martingale_in_truncation(self, rng):
        grid = uniform_grid(128)
        base = sample_field(8, rng, grid)
        start = truncated_gmc(base, 0.3).total_mass()
        masses = np.array([
            truncated_gmc(sample_field(32, rng, grid, field=extend_field(base.field, 32, rng)), 0.3).total_mass()
            for _ in range(400)
        ])
        se = masses.std(ddof=1) / math.sqrt(masses.size)
        assert abs(masses.mean() - start) < 4 * se

    @pytest.mark.slow
    def test_determinant_and_monte_carlo_normalizations_agree(self, rng):
        group = Group(kind=GroupKind.SP, n=4)
        grid = np.array([0.4, 1.1, 2.0, 2.7])
        exact = expected_field(group, 0.5, 0.0, grid, Normalization.DETERMINANT)
        draws = np.array([field_on_grid(sample(group, rng), grid, 0.5, 0.0).values.real for _ in range(4000)])
        se = draws.std(axis=0, ddof=1) / math.sqrt(draws.shape[0])
        assert np.all(np.abs(draws.mean(axis=0) - exact) < 4 * se)
        mc = expected_field(group, 0.5, 0.0, grid, Normalization.MC, rng, mc_samples=4000)
        assert np.all(np.abs(mc - exact) < 4 * se)

    @pytest.mark.slow
    def test_second_mass_moment_from_unitary_measures(self, rng):
        group = Group(kind=GroupKind.U, n=48)
        grid = uniform_grid(8 * 48)
        expected = expected_field(group, 0.4, 0.0, grid, Normalization.DETERMINANT)
        measures = [rm_gmc(group, 0.4, 0.0, grid, Normalization.DETERMINANT, rng, expected=expected)
                    for _ in range(600)]
        mean, se = mass_moment(measures, 2)
        target = fyodorov_bouchaud(2, 0.4)
        assert abs(mean - target) < 0.1 * target + 4 * se
