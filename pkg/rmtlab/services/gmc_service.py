# rmtlab/services/gmc_service.py - Log-correlated limit fields and (truncated / random-matrix) GMC measures

import math
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import numpy as np

from rmtlab.config import settings
from rmtlab.models.ensembles import Group, GroupKind
from rmtlab.models.gmc import DiscreteMeasure, FieldSample, Normalization, ShiftSign, TruncatedGaussianField
from rmtlab.services.charpoly_service import field_on_grid
from rmtlab.services.detkit_service import baik_rains_expectation, sigma_hat
from rmtlab.services.ensemble_service import sample
from rmtlab.utils.errors import IntegrityError, PoleError, PreconditionError
from rmtlab.utils.logger import logger

TWO_PI = 2.0 * math.pi


def uniform_grid(points: int) -> np.ndarray:
    return np.arange(points) * (TWO_PI / points)


def restriction_mask(grid: Sequence[float], eps: float) -> np.ndarray:
    """Indicator of I_eps = (eps, pi - eps) u (pi + eps, 2pi - eps)."""
    theta = np.mod(np.asarray(grid, dtype=float), TWO_PI)
    return ((theta > eps) & (theta < math.pi - eps)) | ((theta > math.pi + eps) & (theta < TWO_PI - eps))


# ---------------------------------------------------------------------------
# Gaussian fields
# ---------------------------------------------------------------------------

def draw_field(k: int, rng: np.random.Generator, shift: ShiftSign = ShiftSign.NONE) -> TruncatedGaussianField:
    if k < 1:
        raise PreconditionError(f"truncation order must be at least 1, got {k}")
    return TruncatedGaussianField(k=k, coefficients=rng.standard_normal(k), shift=shift)


def extend_field(field: TruncatedGaussianField, k: int, rng: np.random.Generator) -> TruncatedGaussianField:
    """Same first coefficients, fresh draws for j > field.k."""
    if k < field.k:
        raise PreconditionError(f"cannot shorten a field from {field.k} to {k}")
    extra = rng.standard_normal(k - field.k)
    return TruncatedGaussianField(k=k, coefficients=np.concatenate([field.coefficients, extra]), shift=field.shift)


def _modes(k: int, grid: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    js = np.arange(1, k + 1)
    angles = np.outer(grid, js)
    return js, np.cos(angles), np.sin(angles)


def shift_field(k: int, grid: Sequence[float], sign: ShiftSign) -> Tuple[np.ndarray, np.ndarray]:
    """(x, x_hat) = sign * sum_{j<=k} (eta_j / j)(cos j theta, sin j theta), eta_j = 1 iff j even."""
    grid = np.asarray(grid, dtype=float)
    js, cos, sin = _modes(k, grid)
    eta = (js % 2 == 0).astype(float) / js
    return sign.factor * cos @ eta, sign.factor * sin @ eta


def sample_field(k: int, rng: np.random.Generator, grid: Sequence[float],
                 shift: ShiftSign = ShiftSign.NONE, field: Optional[TruncatedGaussianField] = None) -> FieldSample:
    """X = sum N_j cos(j theta)/sqrt j and X_hat = sum N_j sin(j theta)/sqrt j on the grid."""
    grid = np.asarray(grid, dtype=float)
    field = field or draw_field(k, rng, shift)
    js, cos, sin = _modes(field.k, grid)
    scaled = field.coefficients / np.sqrt(js)
    x, x_hat = shift_field(field.k, grid, field.shift)
    return FieldSample(field=field, grid=grid, X=cos @ scaled, X_hat=sin @ scaled, x=x, x_hat=x_hat)


def truncated_covariance(alpha: float, beta_im: float, theta, theta_prime, k: int):
    """sum_{j<=k} (1/j)(2a cos j theta + 2b sin j theta)(2a cos j theta' + 2b sin j theta'), beta = i b."""
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    theta_prime = np.atleast_1d(np.asarray(theta_prime, dtype=float))
    js = np.arange(1, k + 1)
    left = 2 * alpha * np.cos(np.outer(theta, js)) + 2 * beta_im * np.sin(np.outer(theta, js))
    right = 2 * alpha * np.cos(np.outer(theta_prime, js)) + 2 * beta_im * np.sin(np.outer(theta_prime, js))
    out = (left * right / js).sum(axis=1)
    return float(out[0]) if out.size == 1 else out


def cov_y(alpha: float, beta_im: float, theta: float, theta_prime: float) -> complex:
    """Cov(Y(theta), Y(theta')) in closed form."""
    diff = np.exp(1j * theta) - np.exp(1j * theta_prime)
    anti = 1.0 - np.exp(1j * (theta + theta_prime))
    if abs(diff) < 1e-15 or abs(anti) < 1e-15:
        raise PoleError("covariance is singular on the diagonal and antidiagonal",
                        {"theta": theta, "theta_prime": theta_prime})
    beta = 1j * beta_im
    return complex(-2.0 * (alpha ** 2 - beta ** 2) * math.log(abs(diff))
                   - 2.0 * (alpha ** 2 + beta ** 2) * math.log(abs(anti))
                   + 4j * alpha * beta * np.log(anti).imag)


# ---------------------------------------------------------------------------
# Measures
# ---------------------------------------------------------------------------

def truncated_gmc(fs: FieldSample, alpha: float, beta_im: float = 0.0) -> DiscreteMeasure:
    """Weights e^{Y^(k) - E(Y^(k))^2 / 2}; total mass has mean 2 pi."""
    if alpha == 0 and beta_im == 0:
        return DiscreteMeasure(theta=fs.grid, weights=np.ones_like(fs.grid), normalization=Normalization.GAUSSIAN)
    variance = truncated_covariance(alpha, beta_im, fs.grid, fs.grid, fs.field.k)
    weights = np.exp(fs.y(alpha, beta_im) - 0.5 * np.asarray(variance))
    return DiscreteMeasure(theta=fs.grid, weights=weights, normalization=Normalization.GAUSSIAN)


@lru_cache(maxsize=4096)
def _exact_one_point(group: Group, alpha: float, beta_im: float, theta: float) -> float:
    return float(baik_rains_expectation(group, sigma_hat(5, alpha, beta_im, theta)).real)


def expected_field(group: Group, alpha: float, beta_im: float, grid: Sequence[float],
                   normalization: Normalization, rng: Optional[np.random.Generator] = None,
                   mc_samples: Optional[int] = None) -> np.ndarray:
    """E f(theta) on the grid, either from the determinant identities or by Monte Carlo."""
    grid = np.asarray(grid, dtype=float)
    if normalization == Normalization.DETERMINANT:
        if group.kind == GroupKind.U:
            return np.full(grid.shape, _exact_one_point(group, alpha, beta_im, 0.0))
        return np.array([_exact_one_point(group, alpha, beta_im, float(th)) for th in grid])
    if rng is None:
        raise PreconditionError("Monte Carlo normalization needs a random generator")
    count = mc_samples or settings.default_samples
    total = np.zeros(grid.shape)
    for _ in range(count):
        total += field_on_grid(sample(group, rng), grid, alpha, beta_im).values.real
    return total / count


def rm_gmc(group: Group, alpha: float, beta_im: float, grid: Sequence[float], normalization: Normalization,
           rng: np.random.Generator, expected: Optional[np.ndarray] = None,
           mc_samples: Optional[int] = None) -> DiscreteMeasure:
    """One draw of f(theta) / E f(theta) from the group; pass `expected` to reuse a normalization."""
    if alpha <= -0.5:
        raise PreconditionError(f"alpha must exceed -1/2, got {alpha}")
    grid = np.asarray(grid, dtype=float)
    if group.kind == GroupKind.U:
        # E f is rotation invariant, so each draw gets its own grid offset
        grid = np.mod(grid + rng.uniform(0.0, TWO_PI / grid.size), TWO_PI)
    if alpha == 0 and beta_im == 0:
        return DiscreteMeasure(theta=grid, weights=np.ones_like(grid), normalization=normalization)
    if expected is None:
        expected = expected_field(group, alpha, beta_im, grid, normalization, rng, mc_samples)
    expected = np.asarray(expected, dtype=float)
    if np.any(expected <= 0) or not np.all(np.isfinite(expected)):
        logger.error(f"Non-positive normalization for {group.label}, alpha={alpha}, beta={beta_im}i")
        raise IntegrityError("normalization E f(theta) is not positive", {"min": float(np.min(expected))})
    values = field_on_grid(sample(group, rng), grid, alpha, beta_im).values.real
    return DiscreteMeasure(theta=grid, weights=values / expected, normalization=normalization)


def mass_moment(measures: List[DiscreteMeasure], m: int, mask: Optional[np.ndarray] = None) -> Tuple[float, float]:
    """Empirical E (mass / 2 pi)^m with its standard error."""
    if m < 1:
        raise PreconditionError(f"m must be at least 1, got {m}")
    if not measures:
        raise PreconditionError("no measures supplied")
    values = np.array([(mu.total_mass(mask) / TWO_PI) ** m for mu in measures])
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return float(values.mean()), se


def mass_growth(alpha: float, m: int, ks: Sequence[int], draws: int, grid: Sequence[float],
                rng: np.random.Generator) -> List[Tuple[int, float, float]]:
    """(k, moment, SE) over increasing truncation; unbounded growth signals m alpha^2 > 1."""
    rows = []
    for k in ks:
        measures = [truncated_gmc(sample_field(k, rng, grid), alpha) for _ in range(draws)]
        estimate, se = mass_moment(measures, m)
        rows.append((int(k), estimate, se))
        logger.info(f"GMC mass moment m={m} alpha={alpha} k={k}: {estimate:.6g} +/- {se:.2g}")
    return rows
