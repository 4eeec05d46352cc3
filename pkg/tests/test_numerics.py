import math

import numpy as np
import pytest
from scipy.special import gamma, gammaln, iv

from rmtlab.models.numerics import QuadratureSpec, RngStream
from rmtlab.services.numerics_service import (
    eigenangles_unitary,
    fourier_coefficient,
    fourier_coefficients,
    log_barnes_g,
    log_barnes_g_pair,
    log_determinant,
    lu_determinant,
    ode_solve,
    rng_generator,
    toeplitz_moment_solve,
)
from rmtlab.utils.errors import DimensionError, DomainError, PreconditionError

rng = np.random.default_rng(7)


class TestDeterminants:
    def test_small_matrix(self):
        assert lu_determinant([[2.0, 1.0], [1.0, 3.0]]) == pytest.approx(5.0)

    def test_empty_matrix_is_one(self):
        assert lu_determinant(np.zeros((0, 0))) == 1.0
        assert log_determinant(np.zeros((0, 0))) == 0.0

    def test_rejects_non_square(self):
        with pytest.raises(DimensionError):
            lu_determinant(np.ones((2, 3)))

    def test_rejects_non_finite(self):
        with pytest.raises(PreconditionError):
            lu_determinant([[np.nan, 0.0], [0.0, 1.0]])

    @pytest.mark.parametrize("size", [5, 80])
    def test_matches_numpy(self, size):
        a = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        sign, logabs = np.linalg.slogdet(a)
        np.testing.assert_allclose(log_determinant(a).real, logabs, rtol=1e-10)
        det = lu_determinant(a)
        np.testing.assert_allclose(np.log(abs(det)), logabs, rtol=1e-10)
        np.testing.assert_allclose(det / abs(det), sign, atol=1e-8)


class TestEigenangles:
    def test_diagonal_unitary(self):
        theta = np.array([2.5, 0.3, 5.0])
        out = eigenangles_unitary(np.diag(np.exp(1j * theta)))
        np.testing.assert_allclose(out, np.sort(theta), atol=1e-12)

    def test_rejects_non_unitary(self):
        with pytest.raises(PreconditionError):
            eigenangles_unitary(2.0 * np.eye(3))


class TestBarnesG:
    @pytest.mark.parametrize("x, expected", [(1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, math.log(2.0)),
                                             (5.0, math.log(12.0))])
    def test_integer_values(self, x, expected):
        assert log_barnes_g(x) == pytest.approx(expected, abs=1e-12)

    def test_recurrence(self):
        # G(x + 1) = Gamma(x) G(x)
        x = 1.37
        assert log_barnes_g(x + 1) == pytest.approx(gammaln(x) + log_barnes_g(x), abs=1e-12)

    def test_pair_reduces_to_square(self):
        assert log_barnes_g_pair(1.4, 0.0) == pytest.approx(2.0 * log_barnes_g(1.4))

    def test_domain(self):
        with pytest.raises(DomainError):
            log_barnes_g(0.0)


class TestFourierCoefficients:
    def test_smooth_symbol(self):
        js = np.arange(-4, 5)
        coeffs = fourier_coefficients(lambda th: np.exp(np.cos(th)), js)
        np.testing.assert_allclose(coeffs.real, iv(np.abs(js), 1.0), atol=1e-13)
        np.testing.assert_allclose(coeffs.imag, 0.0, atol=1e-13)

    @pytest.mark.parametrize("j, expected", [(0, 2.0), (1, -1.0), (-1, -1.0), (2, 0.0)])
    def test_finite_expansion(self, j, expected):
        f = lambda th: np.abs(1 - np.exp(1j * th)) ** 2
        assert fourier_coefficient(f, j) == pytest.approx(expected, abs=1e-13)

    @pytest.mark.parametrize("alpha", [0.3, -0.2, 1.1])
    def test_root_singularity(self, alpha):
        js = np.arange(0, 6)
        spec = QuadratureSpec(singularities=[0.0], exponents=[2 * alpha])
        coeffs = fourier_coefficients(lambda th: np.abs(1 - np.exp(1j * th)) ** (2 * alpha), js, spec)
        expected = [(-1) ** j * gamma(1 + 2 * alpha) / (gamma(1 + alpha + j) * gamma(1 + alpha - j)) for j in js]
        np.testing.assert_allclose(coeffs.real, expected, atol=1e-9)

    def test_spec_rejects_bad_exponent(self):
        with pytest.raises(ValueError):
            QuadratureSpec(singularities=[1.0], exponents=[-1.5])


class TestOde:
    def test_exponential(self):
        sol = ode_solve(lambda x, y: [y[0]], 0.0, 1.0, [1.0])
        assert sol.y[0, -1] == pytest.approx(math.e, rel=1e-9)
        assert sol([0.5])[0, 0] == pytest.approx(math.exp(0.5), rel=1e-8)

    def test_rejects_reversed_interval(self):
        with pytest.raises(PreconditionError):
            ode_solve(lambda x, y: [y[0]], 1.0, 0.0, [1.0])


def test_toeplitz_solve_matches_dense():
    column = np.array([4.0, 1.0, 0.5, 0.1])
    row = np.array([4.0, 0.7, 0.2, 0.05])
    rhs = np.array([1.0, 2.0, 3.0, 4.0])
    dense = np.array([[column[i - j] if i >= j else row[j - i] for j in range(4)] for i in range(4)])
    np.testing.assert_allclose(dense @ toeplitz_moment_solve(column, row, rhs), rhs, atol=1e-12)


class TestRng:
    def test_same_stream_same_draws(self):
        a = rng_generator(RngStream(seed=3, stream=1)).standard_normal(5)
        b = rng_generator(RngStream(seed=3, stream=1)).standard_normal(5)
        np.testing.assert_array_equal(a, b)

    def test_streams_differ(self):
        a = rng_generator(RngStream(seed=3, stream=1)).standard_normal(5)
        b = rng_generator(RngStream(seed=3, stream=2)).standard_normal(5)
        assert not np.allclose(a, b)

    def test_child_streams_are_distinct(self):
        parent = RngStream(seed=1, stream=4)
        assert parent.child(0) != parent.child(1)
