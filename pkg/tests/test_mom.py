import math

import pytest
from scipy import integrate

from rmtlab.models.ensembles import Group, GroupKind
from rmtlab.models.mom import Estimator, MoMQuery, Phase
from rmtlab.services.asymptotics_service import one_point_unitary
from rmtlab.services.mom_service import (
    c_constant,
    fahs_constant,
    fit_growth_exponent,
    fyodorov_bouchaud,
    i_infinity,
    mom_estimate,
    phase_classify,
    phase_table,
    selberg,
    subcritical_prediction,
)
from rmtlab.services.numerics_service import log_barnes_g
from rmtlab.utils.errors import DivergenceError, DomainError, ModeError, PreconditionError

U4 = Group(kind=GroupKind.U, n=4)
O4 = Group(kind=GroupKind.O, n=4)
SP = Group(kind=GroupKind.SP, n=4)
SO = Group(kind=GroupKind.SO, n=8)


class TestClosedForms:
    def test_selberg_beta_function(self):
        assert selberg(1, 2.0, 3.0, 0.1) == pytest.approx(1.0 / 12.0)

    def test_selberg_two_dimensional(self):
        # int_0^1 int_0^1 (x - y)^2 dx dy
        assert selberg(2, 1.0, 1.0, 1.0) == pytest.approx(1.0 / 6.0)

    def test_one_angle_integral_by_quadrature(self):
        alpha = 0.3
        exact, _ = integrate.quad(lambda t: (2 * math.sin(t)) ** (-alpha ** 2 - alpha) / math.pi, 0.0, math.pi,
                                  epsabs=1e-13, epsrel=1e-12, limit=200)
        assert i_infinity(1, alpha, "-") == pytest.approx(exact, rel=1e-6)

    def test_two_angle_integral_by_quadrature(self):
        alpha = 0.5
        power = -alpha ** 2 + alpha

        def inner(t1):
            # the integrand is symmetric, so integrate below the diagonal and double
            value, _ = integrate.quad(
                lambda t2: (2 * math.sin(t2)) ** power * abs(2 * math.cos(t1) - 2 * math.cos(t2)) ** (-2 * alpha ** 2),
                0.0, t1, epsabs=1e-12, epsrel=1e-10, limit=200)
            return 2.0 * (2 * math.sin(t1)) ** power * value

        total, _ = integrate.quad(inner, 0.0, math.pi, epsabs=1e-11, epsrel=1e-9, limit=200)
        assert i_infinity(2, alpha, "+") == pytest.approx(total / math.pi ** 2, rel=1e-4)

    def test_constant_is_barnes_factor_times_integral(self):
        alpha = 0.3
        factor = math.exp(2 * log_barnes_g(1 + alpha) - log_barnes_g(1 + 2 * alpha))
        assert c_constant(1, alpha, "-") == pytest.approx(factor * i_infinity(1, alpha, "-"), rel=1e-12)

    def test_selberg_divergence(self):
        with pytest.raises(DivergenceError):
            selberg(2, 1.0, 1.0, -0.6)
        with pytest.raises(DivergenceError):
            selberg(1, 0.0, 1.0, 0.0)
        with pytest.raises(PreconditionError):
            selberg(0, 1.0, 1.0, 0.0)

    def test_fyodorov_bouchaud(self):
        assert fyodorov_bouchaud(1, 0.4) == pytest.approx(1.0)
        assert fyodorov_bouchaud(2, 0.5) == pytest.approx(math.gamma(0.5) / math.gamma(0.75) ** 2)
        with pytest.raises(DivergenceError):
            fyodorov_bouchaud(2, 0.8)

    @pytest.mark.parametrize("m", [1, 2, 3])
    @pytest.mark.parametrize("sign", ["+", "-"])
    def test_c_constant_at_zero(self, m, sign):
        assert c_constant(m, 0.0, sign) == pytest.approx(1.0)

    def test_c_constant_divergence(self):
        # (sqrt(13) - 1) / 6 ~ 0.434 for m = 2 and the symplectic sign
        with pytest.raises(DivergenceError):
            c_constant(2, 0.5, "-")
        assert c_constant(2, 0.4, "-") > 0

    def test_unitary_prediction_limit(self):
        n, alpha = 2000, 0.3
        predicted = math.log(subcritical_prediction(Group(kind=GroupKind.U, n=n), 1, alpha))
        assert predicted == pytest.approx(one_point_unitary(n, alpha), abs=1e-3)
        assert math.log(fahs_constant(1, alpha)) == pytest.approx(one_point_unitary(n, alpha) - alpha ** 2 * math.log(n),
                                                                 abs=1e-3)


class TestPhases:
    @pytest.mark.parametrize("alpha, phase, exponent", [
        (0.5, Phase.SUBCRITICAL, 0.25),
        (1.0, Phase.CRITICAL, 1.0),
        (1.5, Phase.SUPERCRITICAL, 2.25),
    ])
    def test_unitary_m1(self, alpha, phase, exponent):
        report = phase_classify(U4, 1, alpha)
        assert report.phase == phase
        assert report.exponent == pytest.approx(exponent)
        assert report.log_factor == (phase == Phase.CRITICAL)

    def test_unitary_supercritical(self):
        assert phase_classify(U4, 2, 1.0).exponent == pytest.approx(3.0)

    @pytest.mark.parametrize("alpha, phase, exponent", [
        (0.5, Phase.SUBCRITICAL, 0.5),
        (1 / math.sqrt(2), Phase.CRITICAL, 1.0),
        (0.75, Phase.INTERMEDIATE, 1.25),
        ((math.sqrt(5) + 1) / 4, Phase.CRITICAL, (math.sqrt(5) + 1) ** 2 / 4 - 1),
        (1.0, Phase.SUPERCRITICAL, 4.0),
    ])
    def test_orthogonal_m2(self, alpha, phase, exponent):
        report = phase_classify(O4, 2, alpha)
        assert report.phase == phase
        assert report.exponent == pytest.approx(exponent)
        assert len(report.critical_values) == 2

    @pytest.mark.parametrize("group, m", [(U4, 1), (U4, 3), (SP, 1), (SP, 2), (SO, 1), (SO, 3)])
    def test_exponent_continuous_at_threshold(self, group, m):
        crit = phase_classify(group, m, 0.1).critical_values[-1]
        below = phase_classify(group, m, crit - 1e-7)
        above = phase_classify(group, m, crit + 1e-7)
        assert below.phase == Phase.SUBCRITICAL
        assert above.phase == Phase.SUPERCRITICAL
        assert above.exponent == pytest.approx(below.exponent, abs=1e-5)

    def test_symplectic_threshold(self):
        assert phase_classify(SP, 1, (math.sqrt(5) - 1) / 2).phase == Phase.CRITICAL
        assert phase_classify(SO, 1, (math.sqrt(5) + 1) / 2).phase == Phase.CRITICAL

    def test_alpha_must_be_positive(self):
        with pytest.raises(DomainError):
            phase_classify(U4, 1, 0.0)

    def test_phase_table(self):
        table = phase_table(O4, 2, [0.5, 0.75, 1.0])
        assert list(table.columns) == ["alpha", "phase", "exponent", "log_factor"]
        assert list(table["phase"]) == ["subcritical", "intermediate", "supercritical"]


class TestEstimators:
    def test_alpha_zero(self, rng):
        est = mom_estimate(MoMQuery(group=SO, m=3, alpha=0.0), rng)
        assert est.estimate == 1.0 and est.standard_error == 0.0

    def test_unitary_quadrature_is_exact(self, rng):
        est = mom_estimate(MoMQuery(group=U4, m=1, alpha=0.7, estimator=Estimator.QUADRATURE_M1), rng)
        assert est.estimate == pytest.approx(math.exp(one_point_unitary(4, 0.7)))

    def test_quadrature_needs_m1(self, rng):
        with pytest.raises(ModeError):
            mom_estimate(MoMQuery(group=SO, m=2, alpha=0.3, estimator=Estimator.QUADRATURE_M1), rng)

    def test_unitary_monte_carlo(self, rng):
        est = mom_estimate(MoMQuery(group=U4, m=1, alpha=0.5, samples=2000), rng)
        exact = math.exp(one_point_unitary(4, 0.5))
        assert abs(est.estimate - exact) < 4 * est.standard_error

    def test_growth_exponent(self):
        ns = [10, 20, 40, 80]
        assert fit_growth_exponent(ns, [3.0 * n ** 1.5 for n in ns]) == pytest.approx(1.5)
        with pytest.raises(PreconditionError):
            fit_growth_exponent([10], [1.0])
        with pytest.raises(PreconditionError):
            fit_growth_exponent([10, 20], [1.0, -1.0])

    @pytest.mark.slow
    def test_symplectic_quadrature_matches_prediction(self, rng):
        group = Group(kind=GroupKind.SP, n=32)
        est = mom_estimate(MoMQuery(group=group, m=1, alpha=0.2, estimator=Estimator.QUADRATURE_M1), rng)
        ratio = est.estimate / subcritical_prediction(group, 1, 0.2)
        assert 0.9 < ratio < 1.1
