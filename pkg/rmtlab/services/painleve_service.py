# rmtlab/services/painleve_service.py - Shooting solver for sigma-PV on the negative imaginary axis

import math
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from rmtlab.config import settings
from rmtlab.models.painleve import PainleveParams, PainleveSolution
from rmtlab.services.numerics_service import ode_solve
from rmtlab.utils.errors import IntegrationError, IntegrityError, PreconditionError, RangeError, SolverError
from rmtlab.utils.logger import logger

BLOWUP = 1e4
SCAN_MAGNITUDES = np.geomspace(1e-3, 1e3, 25)
TAIL_PERIODS = 2
TAIL_POINTS = 128
# plain integral, and the 2int / 4int arguments of the Toeplitz and Toeplitz+Hankel expansions
LOG_INTEGRAL_SCALES = (1.0, 2.0, 4.0)


# ---------------------------------------------------------------------------
# Equation in the real variable x, s = -ix
# ---------------------------------------------------------------------------

def quartic(params: PainleveParams, v):
    """P(v) = 4((v - b)^2 + a2^2)((v + b)^2 + a1^2), b = Im (beta1 + beta2)/2."""
    b = params.half_sum_im
    return 4.0 * ((v - b) ** 2 + params.alpha2 ** 2) * ((v + b) ** 2 + params.alpha1 ** 2)


def quartic_derivative(params: PainleveParams, v):
    b = params.half_sum_im
    return 8.0 * ((v - b) * ((v + b) ** 2 + params.alpha1 ** 2) + (v + b) * ((v - b) ** 2 + params.alpha2 ** 2))


def equation_sides(params: PainleveParams, x, sigma, dsigma, ddsigma) -> Tuple[np.ndarray, np.ndarray]:
    """(x^2 sigma''^2, P(sigma') - (sigma - x sigma' - 2 sigma'^2)^2)."""
    q = sigma - x * dsigma - 2.0 * dsigma ** 2
    return x ** 2 * ddsigma ** 2, quartic(params, dsigma) - q ** 2


def residual(sol: PainleveSolution, xs=None) -> np.ndarray:
    """Pointwise |lhs - rhs| / max(1, |lhs| + |rhs|) of the equation on the tabulated (or given) abscissae."""
    if xs is None:
        x, s, ds, dds = sol.x, sol.sigma, sol.dsigma, sol.ddsigma
    else:
        state = sol._state(xs)
        x, s, ds, dds = np.asarray(xs, dtype=float), state[0], state[1], state[2]
    lhs, rhs = equation_sides(sol.params, x, s, ds, dds)
    return np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs) + np.abs(rhs))


def _rhs(params: PainleveParams):
    sigma0 = params.sigma_zero

    def rhs(x, y):
        s, ds, dds, _ = y
        q = s - x * ds - 2.0 * ds ** 2
        ddds = (quartic_derivative(params, ds) + 2.0 * q * (x + 4.0 * ds) - 2.0 * x * dds) / (2.0 * x ** 2)
        return [ds, dds, ddds, (s - sigma0) / x]

    return rhs


def linear_launch_slope(params: PainleveParams) -> float:
    """Real root nearest 0 of P(v) = (sigma0 - 2v^2)^2, the small-x linear slope."""
    b, a1, a2, s0 = params.half_sum_im, params.alpha1, params.alpha2, params.sigma_zero
    p = 4.0 * np.polymul(np.polyadd(np.polymul([1, -b], [1, -b]), [a2 ** 2]),
                         np.polyadd(np.polymul([1, b], [1, b]), [a1 ** 2]))
    q = np.polymul([-2.0, 0.0, s0], [-2.0, 0.0, s0])
    roots = np.roots(np.trim_zeros(np.polysub(p, q), "f")) if np.any(np.polysub(p, q)) else np.array([0.0])
    real = roots[np.abs(roots.imag) < 1e-9].real
    if real.size == 0:
        return 0.0
    return float(real[np.argmin(np.abs(real))])


def _exponent(params: PainleveParams, branch: int) -> float:
    return 1.0 + 2.0 * branch * (params.alpha1 + params.alpha2)


def _initial_state(params: PainleveParams, x0: float, coefficient: float, branch: int) -> List[float]:
    gamma = _exponent(params, branch)
    v0 = linear_launch_slope(params)
    slope = v0 + coefficient * x0 ** (gamma - 1.0)
    sigma = params.sigma_zero + v0 * x0 + coefficient * x0 ** gamma / gamma
    _, g = equation_sides(params, x0, sigma, slope, 0.0)
    if g < 0:
        # move sigma onto G = 0 so the conserved quantity starts at zero
        root = math.sqrt(max(quartic(params, slope), 0.0))
        candidates = [x0 * slope + 2.0 * slope ** 2 + sign * root for sign in (1.0, -1.0)]
        sigma = min(candidates, key=lambda c: abs(c - sigma))
        g = 0.0
    direction = 1.0 if (gamma - 1.0) * (slope - v0) >= 0 else -1.0
    dds = direction * math.sqrt(max(g, 0.0)) / x0
    return [sigma, slope, dds, 0.0]


def _blowup_event(x, y):
    return BLOWUP - abs(y[1])


_blowup_event.terminal = True


def integrate_sigma(params: PainleveParams, coefficient: float, x_max: float, tol: Optional[float] = None,
                    branch: int = 1, x0: Optional[float] = None):
    """One trajectory from x0 with the given launch coefficient; returns the dense ODE solution."""
    x0 = x0 or settings.painleve_x0
    tol = tol or settings.painleve_tol
    y0 = _initial_state(params, x0, coefficient, branch)
    return ode_solve(_rhs(params), x0, x_max, y0, tol=tol, events=_blowup_event)


def _tail_target(params: PainleveParams, x):
    c = params.half_diff_im
    return c * x + 2.0 * c ** 2


def _tail_window(x_max: float) -> np.ndarray:
    return np.linspace(max(0.5 * x_max, x_max - TAIL_PERIODS * 2.0 * math.pi), x_max, TAIL_POINTS)


def _filtered_tail(params: PainleveParams, ode, xs: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Value and slope mismatch against c x + 2c^2 with the unit-frequency oscillation removed.

    Near infinity sigma~ = c x + 2c^2 + (K/x) cos(x + phase) + O(x^-2), so sigma + sigma'' and
    sigma' + sigma''' carry the non-oscillating part only, up to O(x^-2).
    """
    state = ode(xs)
    ddds = np.asarray(_rhs(params)(xs, state)[2])
    value = state[0] + state[2] - _tail_target(params, xs)
    slope = state[1] + ddds - params.half_diff_im
    return value, slope


def _tail_fit(params: PainleveParams, ode, xs: np.ndarray) -> Tuple[float, float]:
    """Least-squares (slope error, offset) of the filtered tail against eps * x + d."""
    value, slope = _filtered_tail(params, ode, xs)
    # value rows divided by x so both blocks are O(eps)
    design = np.vstack([np.column_stack([np.ones_like(xs), 1.0 / xs]),
                        np.column_stack([np.ones_like(xs), np.zeros_like(xs)])])
    target = np.concatenate([value / xs, slope])
    (eps, offset), *_ = np.linalg.lstsq(design, target, rcond=None)
    return float(eps), float(offset)


def _shooting_objective(params: PainleveParams, coefficient: float, x_max: float, tol: float, branch: int) -> float:
    try:
        ode = integrate_sigma(params, coefficient, x_max, tol, branch)
    except IntegrationError as e:
        logger.debug(f"Trajectory with coefficient {coefficient} stopped early: {e}")
        return math.copysign(BLOWUP, coefficient)
    x_end = float(ode.x[-1])
    if x_end < x_max * (1 - 1e-12):
        return float(np.sign(ode.y[1, -1] - params.half_diff_im) * BLOWUP)
    eps, _ = _tail_fit(params, ode, _tail_window(x_max))
    return eps


def tail_mismatch(params: PainleveParams, ode, x_max: float) -> float:
    """Largest filtered |sigma~ - (c x + 2c^2)| over the shooting tail."""
    if ode.x[-1] < x_max * (1 - 1e-12):
        return math.inf
    value, _ = _filtered_tail(params, ode, _tail_window(x_max))
    return float(np.max(np.abs(value)))


def _scan(params: PainleveParams, x_max: float, branch: int) -> List[Tuple[float, float]]:
    grid = np.concatenate([-SCAN_MAGNITUDES[::-1], [0.0], SCAN_MAGNITUDES])
    coarse_tol = max(settings.painleve_tol, 1e-8)
    values = [_shooting_objective(params, c, x_max, coarse_tol, branch) for c in grid]
    brackets = []
    for (c1, f1), (c2, f2) in zip(zip(grid[:-1], values[:-1]), zip(grid[1:], values[1:])):
        if f1 == 0.0:
            brackets.append((c1, c1))
        elif f1 * f2 < 0:
            brackets.append((c1, c2))
    return brackets


def _zero_solution(params: PainleveParams, x_max: float, x0: float) -> PainleveSolution:
    x = np.linspace(x0, x_max, 2)
    zeros = np.zeros_like(x)
    return PainleveSolution(params=params, x0=x0, x_max=x_max, x=x, sigma=zeros, dsigma=zeros,
                            ddsigma=zeros, local_exponent=None, dense=None)


def fit_local_exponent(sol: PainleveSolution) -> Optional[float]:
    xs = np.geomspace(sol.x0, 20 * sol.x0, 12)
    dev = np.abs(sol.sigma_at(xs) - sol.params.sigma_zero - sol.launch_slope * xs)
    if np.any(dev <= 0):
        return None
    slope, _ = np.polyfit(np.log(xs), np.log(dev), 1)
    return float(slope)


def solve_sigma(params: PainleveParams, x_max: float, tol: Optional[float] = None) -> PainleveSolution:
    """Shoot the launch coefficient so the tail settles on c x + 2c^2.

    The trajectory always runs to at least settings.painleve_horizon, so the answer does not depend on
    the requested x_max; the returned table covers (0, max(x_max, horizon)].
    """
    if x_max <= 0:
        raise PreconditionError(f"x_max must be positive, got {x_max}")
    tol = tol or settings.painleve_tol
    x0 = settings.painleve_x0
    if params.is_zero:
        return _zero_solution(params, x_max, x0)
    if x_max <= x0:
        raise PreconditionError(f"x_max must exceed the launch point {x0}")
    horizon = max(x_max, settings.painleve_horizon)

    branches = [1] if params.alpha1 + params.alpha2 <= 0 or 2 * (params.alpha1 + params.alpha2) >= 1 else [1, -1]

    roots: List[Tuple[float, int]] = []
    for branch in branches:
        for lo, hi in _scan(params, horizon, branch):
            if lo == hi:
                roots.append((lo, branch))
                continue
            try:
                root = brentq(lambda c: _shooting_objective(params, c, horizon, tol, branch), lo, hi,
                              xtol=1e-14, rtol=1e-12, maxiter=200)
            except ValueError as e:
                logger.warning(f"Bracket [{lo}, {hi}] lost its sign change at full tolerance: {e}")
                continue
            roots.append((root, branch))
        if roots:
            break

    if not roots:
        logger.error(f"Painleve shooting found no bracket for {params.model_dump()} on (0, {horizon}]")
        raise SolverError("shooting failed to bracket the launch coefficient",
                          {"params": params.model_dump(), "x_max": horizon})

    def mismatch(item: Tuple[float, int]) -> float:
        coefficient, root_branch = item
        return tail_mismatch(params, integrate_sigma(params, coefficient, horizon, tol, root_branch), horizon)

    roots.sort(key=mismatch)
    best, branch = roots[0]
    if len(roots) > 1:
        logger.warning(f"Several shooting roots found; keeping {best} (branch {branch}), others {roots[1:]}")

    ode = integrate_sigma(params, best, horizon, tol, branch)
    if ode.x[-1] < horizon * (1 - 1e-12):
        raise IntegrityError("pole encountered on the negative imaginary axis", {"x": float(ode.x[-1])})

    gamma = _exponent(params, branch)
    sigma_x0 = float(ode.y[0, 0])
    v0 = linear_launch_slope(params)
    head = (sigma_x0 - params.sigma_zero - v0 * x0) / gamma + v0 * x0
    sol = PainleveSolution(
        params=params, x0=x0, x_max=horizon, x=ode.x, sigma=ode.y[0], dsigma=ode.y[1], ddsigma=ode.y[2],
        shooting_parameter=best, branch=branch, launch_slope=v0, head_integral=head, dense=ode,
        alternative_roots=[r for r, _ in roots[1:]],
    )
    sol.local_exponent = fit_local_exponent(sol)
    logger.info(f"Painleve solved: coefficient={best:.10g}, branch={branch}, exponent={sol.local_exponent}")
    return sol


def solution_from_coefficient(params: PainleveParams, coefficient: float, x_max: float,
                              tol: Optional[float] = None, branch: int = 1) -> PainleveSolution:
    """Tabulate the trajectory for a fixed launch coefficient (no shooting)."""
    x0 = settings.painleve_x0
    ode = integrate_sigma(params, coefficient, x_max, tol, branch)
    gamma = _exponent(params, branch)
    v0 = linear_launch_slope(params)
    head = (float(ode.y[0, 0]) - params.sigma_zero - v0 * x0) / gamma + v0 * x0
    return PainleveSolution(params=params, x0=x0, x_max=float(ode.x[-1]), x=ode.x, sigma=ode.y[0],
                            dsigma=ode.y[1], ddsigma=ode.y[2], shooting_parameter=coefficient, branch=branch,
                            launch_slope=v0, head_integral=head, dense=ode)


def log_integral(sol: PainleveSolution, upper: float, scale: float = 1.0) -> float:
    """int_0^{scale * upper} (sigma~(x) - sigma0) / x dx, scale one of LOG_INTEGRAL_SCALES."""
    if scale not in LOG_INTEGRAL_SCALES:
        raise PreconditionError(f"scale must be one of {LOG_INTEGRAL_SCALES}, got {scale}")
    x_up = scale * upper
    if x_up < 0:
        raise RangeError("upper limit must be non-negative")
    if x_up == 0 or sol.dense is None:
        return 0.0
    if x_up > sol.x_max * (1 + 1e-12):
        raise RangeError(f"upper limit {x_up} beyond the tabulated range {sol.x_max}")
    if x_up <= sol.x0:
        return sol.head_integral * (x_up / sol.x0) ** _exponent(sol.params, sol.branch)
    return float(sol.head_integral + sol.cumulative_integral([x_up])[0])


def to_frame(sol: PainleveSolution) -> pd.DataFrame:
    return pd.DataFrame({"x": np.asarray(sol.x), "sigma": np.asarray(sol.sigma), "dsigma": np.asarray(sol.dsigma)})
