# rmtlab/services/mom_service.py - Moments of moments: closed-form constants, estimators and phase diagrams

import math
from typing import Sequence

import numpy as np
import pandas as pd
from scipy.special import gammaln

from rmtlab.models.ensembles import Group, GroupKind
from rmtlab.models.mom import Estimator, MoMEstimate, MoMQuery, Phase, PhaseReport
from rmtlab.services.asymptotics_service import one_point_unitary
from rmtlab.services.charpoly_service import field_on_grid
from rmtlab.services.detkit_service import baik_rains_expectation, single_singularity
from rmtlab.services.ensemble_service import sample
from rmtlab.services.numerics_service import log_barnes_g
from rmtlab.utils.errors import DivergenceError, DomainError, ModeError, PreconditionError
from rmtlab.utils.logger import logger

THRESHOLD_TOL = 1e-12
O_INTERMEDIATE_UPPER = (math.sqrt(5.0) + 1.0) / 4.0


# ---------------------------------------------------------------------------
# Closed forms
# ---------------------------------------------------------------------------

def selberg(m: int, a: float, b: float, c: float) -> float:
    """Selberg integral over [0, 1]^m with weights |x_j - x_k|^{2c} (1 - x)^{a-1} x^{b-1}."""
    if m < 1:
        raise PreconditionError(f"m must be positive, got {m}")
    bound = 1.0 / m if m == 1 else min(1.0 / m, a / (m - 1), b / (m - 1))
    if a <= 0 or b <= 0 or c <= -bound:
        raise DivergenceError(f"Selberg integral diverges for m={m}, a={a}, b={b}, c={c}")
    j = np.arange(m, dtype=float)
    log_value = np.sum(gammaln(1 + c + j * c) + gammaln(a + j * c) + gammaln(b + j * c)
                       - gammaln(1 + c) - gammaln(a + b + c * (m + j - 1)))
    return float(np.exp(log_value))


def _sign_value(sign: str) -> int:
    if sign not in ("+", "-"):
        raise PreconditionError(f"sign must be '+' or '-', got {sign!r}")
    return 1 if sign == "+" else -1


def subcritical_bound(m: int, sign: str) -> float:
    s = _sign_value(sign)
    edge = (math.sqrt(8 * m - 3) + s) / (4 * m - 2)
    return edge if m == 1 else min(1.0 / math.sqrt(m), edge)


def i_infinity(m: int, alpha: float, sign: str) -> float:
    """The angle integral of the subcritical constant, by reduction to a Selberg integral."""
    s = _sign_value(sign)
    a = 0.5 * (1.0 - alpha ** 2 + s * alpha)
    prefactor = 4.0 ** (-(alpha * m) ** 2 + s * alpha * m) / math.pi ** m
    return prefactor * selberg(m, a, a, -alpha ** 2)


def c_constant(m: int, alpha: float, sign: str) -> float:
    bound = subcritical_bound(m, sign)
    if alpha >= bound:
        raise DivergenceError(f"C{sign}({m}, {alpha}) is infinite: alpha must stay below {bound:.12g}")
    log_g = 2 * m * log_barnes_g(1.0 + alpha) - m * log_barnes_g(1.0 + 2.0 * alpha)
    return math.exp(log_g) * i_infinity(m, alpha, sign)


def fyodorov_bouchaud(m: int, alpha: float) -> float:
    if m * alpha ** 2 >= 1:
        raise DivergenceError(f"m alpha^2 = {m * alpha ** 2} >= 1: the moment of total mass is infinite")
    return math.exp(gammaln(1 - m * alpha ** 2) - m * gammaln(1 - alpha ** 2))


def fahs_constant(m: int, alpha: float) -> float:
    log_g = 2 * m * log_barnes_g(1.0 + alpha) - m * log_barnes_g(1.0 + 2.0 * alpha)
    return math.exp(log_g) * fyodorov_bouchaud(m, alpha)


def subcritical_prediction(group: Group, m: int, alpha: float) -> float:
    size = group.matrix_size
    if group.kind == GroupKind.U:
        return size ** (m * alpha ** 2) * fahs_constant(m, alpha)
    sign = "-" if group.kind == GroupKind.SP else "+"
    return size ** (m * alpha ** 2) * c_constant(m, alpha, sign)


# ---------------------------------------------------------------------------
# Estimators
# ---------------------------------------------------------------------------

def _mc_estimate(q: MoMQuery, rng: np.random.Generator) -> MoMEstimate:
    size = max(q.group.matrix_size, 1)
    points = q.grid or 8 * size
    spacing = 2.0 * math.pi / points
    base = np.arange(points) * spacing
    values = np.empty(q.samples)
    for i in range(q.samples):
        s = sample(q.group, rng)
        grid = base + rng.uniform(0.0, spacing)
        field = field_on_grid(s, grid, q.alpha)
        values[i] = float(np.mean(field.values.real)) ** q.m
    se = float(values.std(ddof=1) / math.sqrt(q.samples)) if q.samples > 1 else 0.0
    return MoMEstimate(query=q, estimate=float(values.mean()), standard_error=se)


def _theta_nodes(points: int):
    # Gauss-Legendre in u, theta = pi (1 - cos u) / 2 clusters nodes at 0 and pi
    x, w = np.polynomial.legendre.leggauss(points)
    u = 0.5 * math.pi * (x + 1.0)
    theta = 0.5 * math.pi * (1.0 - np.cos(u))
    weights = 0.5 * math.pi * w * 0.5 * math.pi * np.sin(u)
    return theta, weights


def _quadrature_m1(q: MoMQuery) -> MoMEstimate:
    if q.m != 1:
        raise ModeError("quadrature-m1 estimator handles m = 1 only", {"m": q.m})
    if q.group.kind == GroupKind.U:
        value = math.exp(one_point_unitary(q.group.matrix_size, q.alpha))
        return MoMEstimate(query=q, estimate=value, standard_error=0.0)
    theta, weights = _theta_nodes(q.grid or 64)
    one_point = np.array([baik_rains_expectation(q.group, single_singularity(th, q.alpha)).real for th in theta])
    # E|p(theta)|^{2a} is even in theta for conjugation-closed spectra
    value = float(np.dot(weights, one_point) / math.pi)
    logger.info(f"quadrature-m1 {q.group.label} alpha={q.alpha}: {value:.10g} from {theta.size} nodes")
    return MoMEstimate(query=q, estimate=value, standard_error=0.0)


def mom_estimate(q: MoMQuery, rng: np.random.Generator) -> MoMEstimate:
    if q.alpha == 0:
        return MoMEstimate(query=q, estimate=1.0, standard_error=0.0)
    if q.estimator == Estimator.QUADRATURE_M1:
        return _quadrature_m1(q)
    return _mc_estimate(q, rng)


# ---------------------------------------------------------------------------
# Phase diagram
# ---------------------------------------------------------------------------

def _at(alpha: float, threshold: float) -> bool:
    return math.isclose(alpha, threshold, rel_tol=THRESHOLD_TOL, abs_tol=THRESHOLD_TOL)


def phase_classify(group: Group, m: int, alpha: float) -> PhaseReport:
    if alpha <= 0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    sub = m * alpha ** 2
    if group.kind == GroupKind.U:
        crit = 1.0 / math.sqrt(m)
        if _at(alpha, crit):
            return PhaseReport(phase=Phase.CRITICAL, exponent=sub, log_factor=True, critical_values=[crit])
        if alpha < crit:
            return PhaseReport(phase=Phase.SUBCRITICAL, exponent=sub, critical_values=[crit])
        return PhaseReport(phase=Phase.SUPERCRITICAL, exponent=m * m * alpha ** 2 + 1 - m, critical_values=[crit])

    if group.kind == GroupKind.SP:
        crit = (math.sqrt(8 * m - 3) - 1) / (4 * m - 2)
        sup = 2 * (m * alpha) ** 2 + m * alpha - m
    else:
        crit = (math.sqrt(8 * m - 3) + 1) / (4 * m - 2)
        sup = 2 * (m * alpha) ** 2 - m * alpha - m
        if m == 2:
            return _orthogonal_m2(alpha)
    if _at(alpha, crit):
        return PhaseReport(phase=Phase.CRITICAL, exponent=sub, log_factor=True, critical_values=[crit])
    if alpha < crit:
        return PhaseReport(phase=Phase.SUBCRITICAL, exponent=sub, critical_values=[crit])
    return PhaseReport(phase=Phase.SUPERCRITICAL, exponent=sup, critical_values=[crit])


def _orthogonal_m2(alpha: float) -> PhaseReport:
    lower, upper = 1.0 / math.sqrt(2.0), O_INTERMEDIATE_UPPER
    crits = [lower, upper]
    if _at(alpha, lower):
        return PhaseReport(phase=Phase.CRITICAL, exponent=2 * alpha ** 2, log_factor=True, critical_values=crits)
    if alpha < lower:
        return PhaseReport(phase=Phase.SUBCRITICAL, exponent=2 * alpha ** 2, critical_values=crits)
    if _at(alpha, upper):
        return PhaseReport(phase=Phase.CRITICAL, exponent=4 * alpha ** 2 - 1, log_factor=True, critical_values=crits)
    if alpha < upper:
        return PhaseReport(phase=Phase.INTERMEDIATE, exponent=4 * alpha ** 2 - 1, critical_values=crits)
    return PhaseReport(phase=Phase.SUPERCRITICAL, exponent=8 * alpha ** 2 - 2 * alpha - 2, critical_values=crits)


def phase_table(group: Group, m: int, alphas: Sequence[float]) -> pd.DataFrame:
    rows = []
    for a in alphas:
        report = phase_classify(group, m, float(a))
        rows.append({"alpha": float(a), "phase": report.phase.value, "exponent": report.exponent,
                     "log_factor": int(report.log_factor)})
    return pd.DataFrame(rows, columns=["alpha", "phase", "exponent", "log_factor"])


def fit_growth_exponent(ns: Sequence[int], values: Sequence[float]) -> float:
    """Least-squares slope of log value against log n."""
    ns, values = np.asarray(ns, dtype=float), np.asarray(values, dtype=float)
    if ns.size < 2 or np.any(values <= 0):
        raise PreconditionError("growth fit needs at least two positive values")
    slope, _ = np.polyfit(np.log(ns), np.log(values), 1)
    return float(slope)
