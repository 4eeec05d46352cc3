# rmtlab/services/asymptotics_service.py - Asymptotic expansions of Toeplitz and Toeplitz+Hankel determinants

import cmath
import math
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.special import gammaln

from rmtlab.config import settings
from rmtlab.models.asymptotics import AsymptoticPrediction, DiagnosticRow, MergingParams, Regime
from rmtlab.models.detkit import FHSymbol, Singularity
from rmtlab.models.painleve import PainleveSolution
from rmtlab.services.numerics_service import log_barnes_g, log_barnes_g_pair
from rmtlab.services.painleve_service import log_integral, solve_sigma
from rmtlab.utils.errors import DomainError, PreconditionError, RegimeError
from rmtlab.utils.logger import logger

TWO_PI = 2.0 * math.pi
LOG_G_HALF = log_barnes_g(0.5)

# kappa -> (q(n), s', t')
DIK_TABLE = {
    1: (lambda n: -2 * n + 2, -0.5, -0.5),
    2: (lambda n: 0, 0.5, 0.5),
    3: (lambda n: -n, 0.5, -0.5),
    4: (lambda n: -n, -0.5, 0.5),
}


# ---------------------------------------------------------------------------
# Shared pieces
# ---------------------------------------------------------------------------

def _g_term(alpha: float, beta_im: float) -> float:
    """log G(1+a+b)G(1+a-b)/G(1+2a) for b = i beta_im."""
    if alpha == 0.0 and beta_im == 0.0:
        return 0.0
    return log_barnes_g_pair(1.0 + alpha, beta_im) - log_barnes_g(1.0 + 2.0 * alpha)


def _truncate(V: Dict[int, complex], K: Optional[int] = None) -> Tuple[Dict[int, complex], float]:
    K = K or settings.truncation_k
    kept = {k: c for k, c in V.items() if abs(k) <= K}
    tail = float(sum(abs(k) * abs(c) ** 2 for k, c in V.items() if abs(k) > K))
    if tail:
        logger.info(f"V truncated at |k| <= {K}; dropped tail bound {tail:.3e}")
    return kept, tail


def _energy(V: Dict[int, complex]) -> complex:
    return sum(k * V[k] * V.get(-k, 0) for k in V if k > 0)


def _half_series(V: Dict[int, complex], z: complex, sign: int) -> complex:
    """sum_{k >= 1} V_{sign k} z^{sign k}."""
    return sum(c * z ** k for k, c in V.items() if k * sign > 0)


def _kappa(kappa: int):
    if kappa not in DIK_TABLE:
        raise PreconditionError(f"kappa must be one of 1..4, got {kappa}")
    return DIK_TABLE[kappa]


def _check_separation(thetas: Sequence[float], eps: float, what: str = "singularities") -> None:
    ts = sorted(t % TWO_PI for t in thetas)
    if len(ts) < 2:
        return
    gaps = np.diff(ts + [ts[0] + TWO_PI])
    if gaps.min() < eps:
        raise RegimeError(f"{what} closer than {eps} (min gap {gaps.min():.3e}); "
                          f"use uniform_toeplitz/uniform_th or claeys_envelope",
                          {"min_gap": float(gaps.min())})


def _plain_fh(sym: FHSymbol) -> None:
    if sym.laurent:
        raise RegimeError("asymptotic evaluators need the symbol in pure e^V x FH form (no Laurent factor)")


# ---------------------------------------------------------------------------
# Separated regime
# ---------------------------------------------------------------------------

def szego(sym: FHSymbol, n: int) -> AsymptoticPrediction:
    _plain_fh(sym)
    if sym.active_singularities:
        raise RegimeError("strong Szego limit needs a symbol without singularities; use ehrhardt")
    V, tail = _truncate(sym.v_dict)
    log_value = n * V.get(0, 0) + _energy(V)
    return AsymptoticPrediction(log_value=complex(log_value), regime=Regime.SZEGO, n=n,
                                symbol=sym.to_document(), tail_bound=tail)


def _ehrhardt_log(V: Dict[int, complex], sing: List[Singularity], n: int) -> complex:
    total = n * V.get(0, 0) + _energy(V)
    for s in sing:
        a, b = s.alpha, s.beta
        z = cmath.exp(1j * s.theta)
        total += math.log(n) * (a * a - b * b)
        total -= (a - b) * _half_series(V, z, 1) + (a + b) * _half_series(V, z, -1)
        total += _g_term(a, s.beta_im)
    for j, sj in enumerate(sing):
        for sk in sing[j + 1:]:
            gap = abs(2.0 * math.sin(0.5 * (sk.theta - sj.theta)))
            total += 2.0 * (sj.beta * sk.beta - sj.alpha * sk.alpha) * math.log(gap)
            total += (sj.alpha * sk.beta - sk.alpha * sj.beta) * 1j * (sk.theta - sj.theta - math.pi)
    return complex(total)


def ehrhardt(sym: FHSymbol, n: int) -> AsymptoticPrediction:
    """Fisher-Hartwig expansion of D_n(f) for separated singularities."""
    _plain_fh(sym)
    sing = sym.active_singularities
    _check_separation([s.theta for s in sing], settings.separation_eps)
    V, tail = _truncate(sym.v_dict)
    return AsymptoticPrediction(log_value=_ehrhardt_log(V, sing, n), regime=Regime.SEPARATED, n=n,
                                symbol=sym.to_document(), tail_bound=tail)


def _split_even(sym: FHSymbol) -> Tuple[float, float, List[Singularity]]:
    if not sym.is_even:
        raise PreconditionError("Toeplitz+Hankel asymptotics need an even symbol")
    alpha0 = alpha_pi = 0.0
    upper = []
    for s in sym.active_singularities:
        if s.theta == 0.0:
            alpha0 = s.alpha
        elif s.theta == math.pi:
            alpha_pi = s.alpha
        elif s.theta < math.pi:
            upper.append(s)
    return alpha0, alpha_pi, upper


def _dik_log(V: Dict[int, complex], alpha0: float, alpha_pi: float, upper: List[Tuple[float, float, complex]],
             n: int, kappa: int) -> complex:
    """DIK expansion; upper holds (theta_j, alpha_j, beta_j) with theta_j in (0, pi)."""
    q_of, s1, t1 = _kappa(kappa)
    q = q_of(n)
    a0s, ars = alpha0 + s1, alpha_pi + t1
    big_a = alpha0 + alpha_pi + s1 + t1
    a_tilde = 0.5 * big_a + sum(a for _, a, _ in upper)
    v0 = V.get(0, 0)
    v_plus = sum(V.values())
    v_minus = sum(c * (-1) ** k for k, c in V.items())

    total = n * v0 + 0.5 * (big_a * v0 - a0s * v_plus - ars * v_minus + _energy(V))
    sq = sum(a * a - b * b for _, a, b in upper)
    total += math.log(2.0) * ((1 - s1 - t1) * n + q + sq - 0.5 * big_a ** 2 + 0.5 * big_a)
    total += math.log(n) * (0.5 * (alpha0 ** 2 + alpha_pi ** 2) + alpha0 * s1 + alpha_pi * t1 + sq)

    beta_sum = sum(b for _, _, b in upper)
    cross = 0j
    for j, (tj, aj, bj) in enumerate(upper):
        for tk, ak, bk in upper[j + 1:]:
            cross += aj * bk - ak * bj
            total -= 2.0 * (aj * ak - bj * bk) * math.log(abs(2.0 * math.sin(0.5 * (tj - tk))))
            total -= 2.0 * (aj * ak + bj * bk) * math.log(abs(2.0 * math.sin(0.5 * (tj + tk))))
    total -= 1j * math.pi * ((alpha0 + s1 + sum(a for _, a, _ in upper)) * beta_sum + cross)

    for theta, a, b in upper:
        z = cmath.exp(1j * theta)
        total += (-a + b) * _half_series(V, z, 1) + (-a - b) * _half_series(V, z, -1)
        total += 2.0 * a_tilde * b * 1j * theta
        total -= (a * a + b * b) * math.log(2.0 * math.sin(theta))
        total -= 2.0 * a * a0s * math.log(2.0 * math.sin(0.5 * theta))
        total -= 2.0 * a * ars * math.log(2.0 * math.cos(0.5 * theta))

    total += 0.5 * (big_a + 1) * math.log(math.pi) + 2.0 * LOG_G_HALF
    total -= log_barnes_g(1.0 + a0s) + log_barnes_g(1.0 + ars)
    return complex(total)


def dik_th(sym: FHSymbol, n: int, kappa: int) -> AsymptoticPrediction:
    """Toeplitz+Hankel expansion for an even symbol with separated singularities away from +-1."""
    _plain_fh(sym)
    _kappa(kappa)
    alpha0, alpha_pi, upper = _split_even(sym)
    eps = settings.separation_eps
    _check_separation([s.theta for s in upper] + [0.0, math.pi], eps)
    V, tail = _truncate(sym.v_dict)
    log_value = _dik_log(V, alpha0, alpha_pi, [(s.theta, s.alpha, s.beta) for s in upper], n, kappa)
    for s in upper:
        log_value += _g_term(s.alpha, s.beta_im)
    return AsymptoticPrediction(log_value=log_value, regime=Regime.SEPARATED, n=n, kappa=kappa,
                                symbol=sym.to_document(), tail_bound=tail)


# ---------------------------------------------------------------------------
# Merging regime
# ---------------------------------------------------------------------------

def merging_symbol(p: float, t: float, params: MergingParams, V: Optional[Dict[int, float]] = None) -> FHSymbol:
    """The two-conjugate-pair symbol f_{p,t}."""
    sing = [Singularity(theta=th, alpha=a, beta_im=b) for th, a, b in params.locations(p, t) if a or b]
    return FHSymbol(V=V or {}, singularities=sing)


def _check_merging(p: float, t: float, params: MergingParams, V: Dict[int, complex]) -> None:
    eps = settings.separation_eps
    if not eps < p < math.pi - eps:
        raise RegimeError(f"p must lie in ({eps}, pi - {eps}), got {p}")
    if not 0 < t < min(p, math.pi - p):
        raise RegimeError(f"t must lie in (0, {min(p, math.pi - p)}), got {t}")
    if any(abs(V.get(k, 0) - V.get(-k, 0)) > 1e-14 for k in V):
        raise PreconditionError("merging expansions need an even potential V")


def _painleve_for(params: MergingParams, painleve: Optional[PainleveSolution], x_up: float) -> PainleveSolution:
    if painleve is None:
        return solve_sigma(params.painleve, max(x_up, 2.0 * settings.painleve_x0))
    if painleve.params != params.painleve:
        raise PreconditionError("Painleve solution was computed for different (alpha1, alpha2, beta1, beta2)")
    return painleve


def _merged_g_term(params: MergingParams) -> float:
    a = params.alpha1 + params.alpha2
    b = params.beta1_im + params.beta2_im
    return _g_term(a, b)


def uniform_toeplitz(p: float, t: float, params: MergingParams, V: Optional[Dict[int, float]], n: int,
                     painleve: Optional[PainleveSolution] = None) -> AsymptoticPrediction:
    V = {int(k): complex(c) for k, c in (V or {}).items()}
    _check_merging(p, t, params, V)
    V, tail = _truncate(V)
    sol = _painleve_for(params, painleve, 2 * n * t)
    locs = params.locations(p, t)
    b1, b2 = 1j * params.beta1_im, 1j * params.beta2_im
    a1, a2 = params.alpha1, params.alpha2

    total = 2j * n * t * (b1 - b2) + n * V.get(0, 0) + _energy(V)
    for theta, a, b_im in locs:
        b = 1j * b_im
        z = cmath.exp(1j * theta)
        total += math.log(n) * (a * a - b * b)
        total -= (a - b) * _half_series(V, z, 1) + (a + b) * _half_series(V, z, -1)
    for j in range(6):
        for k in range(j + 1, 6):
            if (j, k) in ((1, 2), (4, 5)):
                continue
            tj, aj, bj = locs[j][0], locs[j][1], 1j * locs[j][2]
            tk, ak, bk = locs[k][0], locs[k][1], 1j * locs[k][2]
            if not (aj or bj) or not (ak or bk):
                continue
            total += 2.0 * (bj * bk - aj * ak) * math.log(abs(2.0 * math.sin(0.5 * (tk - tj))))
            total += (aj * bk - ak * bj) * 1j * (tk - tj - math.pi)
    total += 4j * t * (a1 * b2 - a2 * b1)
    total += 2.0 * log_integral(sol, 2 * n * t)
    total += 4.0 * (b1 * b2 - a1 * a2) * math.log(math.sin(t) / (n * t))
    total += _g_term(params.alpha0, 0.0) + _g_term(params.alpha3, 0.0) + 2.0 * _merged_g_term(params)
    return AsymptoticPrediction(log_value=complex(total), regime=Regime.MERGING, n=n,
                                symbol=merging_symbol(p, t, params, {k: c.real for k, c in V.items()}).to_document(),
                                tail_bound=tail)


def uniform_th(p: float, t: float, params: MergingParams, V: Optional[Dict[int, float]], n: int, kappa: int,
               painleve: Optional[PainleveSolution] = None) -> AsymptoticPrediction:
    V = {int(k): complex(c) for k, c in (V or {}).items()}
    _kappa(kappa)
    _check_merging(p, t, params, V)
    V, tail = _truncate(V)
    sol = _painleve_for(params, painleve, 4 * n * t)
    b1, b2 = 1j * params.beta1_im, 1j * params.beta2_im
    a1, a2 = params.alpha1, params.alpha2
    upper = [(p - t, a1, b1), (p + t, a2, b2)]

    # the separated-pair cross terms are replaced by the merging factors below
    total = _dik_log(V, params.alpha0, params.alpha3, [], n, kappa)
    _, s1, _ = DIK_TABLE[kappa]
    big_a = params.alpha0 + params.alpha3 + s1 + DIK_TABLE[kappa][2]
    a_tilde = 0.5 * big_a + a1 + a2
    a0s, ars = params.alpha0 + s1, params.alpha3 + DIK_TABLE[kappa][2]
    sq = sum(a * a - b * b for _, a, b in upper)
    total += 2j * n * t * (b1 - b2) + (math.log(2.0) + math.log(n)) * sq
    total -= 1j * math.pi * (params.alpha0 + s1 + a1 + a2) * (b1 + b2)
    total -= 2.0 * (a1 * a2 - b1 * b2) * math.log(abs(math.sin(t) / (2 * n * t)))
    total -= 2.0 * (a1 * a2 + b1 * b2) * math.log(abs(2.0 * math.sin(p)))
    total += log_integral(sol, 4 * n * t)
    for theta, a, b in upper:
        z = cmath.exp(1j * theta)
        total += (-a + b) * _half_series(V, z, 1) + (-a - b) * _half_series(V, z, -1)
        total += 2.0 * a_tilde * b * 1j * theta
        total -= (a * a + b * b) * math.log(2.0 * math.sin(theta))
        total -= 2.0 * a * a0s * math.log(2.0 * math.sin(0.5 * theta))
        total -= 2.0 * a * ars * math.log(2.0 * math.cos(0.5 * theta))
    total += _merged_g_term(params)
    return AsymptoticPrediction(log_value=complex(total), regime=Regime.MERGING, n=n, kappa=kappa,
                                symbol=merging_symbol(p, t, params, {k: c.real for k, c in V.items()}).to_document(),
                                tail_bound=tail)


def relation_gap(params: MergingParams, p: float, t: float, n: int,
                 painleve: Optional[PainleveSolution] = None) -> complex:
    """Left minus right side of the identity linking the merged and separated constants; -> 0 as nt -> inf."""
    sol = _painleve_for(params, painleve, 2 * n * t)
    a1, a2 = params.alpha1, params.alpha2
    b1, b2 = 1j * params.beta1_im, 1j * params.beta2_im
    lhs = 2.0 * (_g_term(a1, params.beta1_im) + _g_term(a2, params.beta2_im)) - 2j * math.pi * (a1 * b2 - a2 * b1)
    rhs = (2j * n * t * (b1 - b2) + 2.0 * log_integral(sol, 2 * n * t)
           + 4.0 * (b1 * b2 - a1 * a2) * math.log(1.0 / (2 * n * t)) + 2.0 * _merged_g_term(params))
    return complex(lhs - rhs)


# ---------------------------------------------------------------------------
# Envelope and exact references
# ---------------------------------------------------------------------------

def claeys_envelope(thetas: Sequence[float], alphas: Sequence[float], betas_im: Sequence[float], n: int,
                    kappa: int, V0: float = 0.0) -> AsymptoticPrediction:
    """Algebraic envelope of D_n^{T+H,kappa}, uniform in the singularity positions; no e^{O(1)} constant."""
    _kappa(kappa)
    if not len(thetas) == len(alphas) == len(betas_im):
        raise PreconditionError("thetas, alphas and betas must have equal length")
    if any(a < 0 for a in alphas):
        raise DomainError("envelope holds for alpha_j >= 0 only", {"alphas": list(alphas)})
    if any(not 0 < th < math.pi for th in thetas):
        raise DomainError("envelope singularities must lie in (0, pi)")
    h = 1.0 / n
    total = n * V0
    for th, a, b in zip(thetas, alphas, betas_im):
        quad = a * a - b * b  # alpha^2 + beta^2 with beta = i b
        total += (a * a + b * b) * math.log(n)
        if kappa == 1:
            total += (a - quad) * math.log(math.sin(th) + h)
        elif kappa == 2:
            total += (-a - quad) * math.log(math.sin(th) + h)
        elif kappa == 3:
            total += (-a - quad) * math.log(math.sin(0.5 * th) + h) + (a - quad) * math.log(math.cos(0.5 * th) + h)
        else:
            total += (a - quad) * math.log(math.sin(0.5 * th) + h) + (-a - quad) * math.log(math.cos(0.5 * th) + h)
    for j in range(len(thetas)):
        for k in range(j + 1, len(thetas)):
            aa = alphas[j] * alphas[k]
            bb = -betas_im[j] * betas_im[k]
            total -= 2.0 * (aa - bb) * math.log(math.sin(abs(thetas[j] - thetas[k]) / 2) + h)
            total -= 2.0 * (aa + bb) * math.log(math.sin(abs(thetas[j] + thetas[k]) / 2) + h)
    return AsymptoticPrediction(log_value=complex(total), regime=Regime.ENVELOPE, n=n, kappa=kappa)


def one_point_unitary(n: int, alpha: float) -> float:
    """log E_{U(n)} |p(theta)|^{2 alpha}, exact."""
    if alpha <= -0.5:
        raise DomainError(f"alpha must exceed -1/2, got {alpha}")
    j = np.arange(n, dtype=float)
    return float(np.sum(gammaln(j + 1) + gammaln(j + 1 + 2 * alpha) - 2.0 * gammaln(j + 1 + alpha)))


def diagnostic_table(rows: Iterable[DiagnosticRow]) -> pd.DataFrame:
    frame = pd.DataFrame([r.as_dict() for r in rows], columns=["n", "t", "exact", "predicted", "ratio"])
    return frame
