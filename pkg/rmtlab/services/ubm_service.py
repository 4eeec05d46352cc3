# rmtlab/services/ubm_service.py - Dyson eigenangle dynamics, OU limit fields and Sobolev diagnostics

import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from rmtlab.config import settings
from rmtlab.models.charpoly import FieldGrid
from rmtlab.models.ensembles import Group, GroupKind
from rmtlab.models.ubm import DysonPath, OUFieldPath
from rmtlab.services.ensemble_service import full_spectrum, sample
from rmtlab.utils.errors import DomainError, PreconditionError, StepError
from rmtlab.utils.logger import logger

TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# Dyson Brownian motion on the circle
# ---------------------------------------------------------------------------

def _drift(theta: np.ndarray, n: int) -> np.ndarray:
    """(1/n) sum_{k != j} cot((theta_j - theta_k)/2), batched over paths."""
    diff = theta[:, :, None] - theta[:, None, :]
    with np.errstate(divide="ignore", invalid="ignore"):
        cot = 1.0 / np.tan(0.5 * diff)
    idx = np.arange(n)
    cot[:, idx, idx] = 0.0
    return cot.sum(axis=2) / n


def _min_gap(theta: np.ndarray) -> float:
    wrapped = np.concatenate([theta, theta[:, :1] + TWO_PI], axis=1)
    return float(np.min(np.diff(wrapped, axis=1)))


class _DysonStepper:
    def __init__(self, n: int, rng: np.random.Generator, time_rescale: bool):
        self.n = n
        self.rng = rng
        self.scale = 0.5 if time_rescale else 1.0
        self.cap = settings.dyson_max_halvings
        self.halvings = 0

    def advance(self, theta: np.ndarray, h: float, depth: int = 0) -> np.ndarray:
        eff = self.scale * h
        noise = self.rng.standard_normal(theta.shape) * math.sqrt(2.0 * eff / self.n)
        proposal = theta + _drift(theta, self.n) * eff + noise if self.n > 1 else theta + noise
        if self.n == 1 or _min_gap(proposal) >= math.sqrt(h) / self.n:
            return proposal
        if depth >= self.cap:
            logger.error(f"Dyson step {h:.3e} failed after {depth} halvings")
            raise StepError("sub-step cap exceeded", {"state": theta.tolist(), "h": h, "depth": depth})
        self.halvings += 1
        half = self.advance(theta, 0.5 * h, depth + 1)
        return self.advance(half, 0.5 * h, depth + 1)


def _haar_initial(n: int, paths: int, rng: np.random.Generator) -> np.ndarray:
    group = Group(kind=GroupKind.U, n=n)
    return np.stack([np.sort(full_spectrum(sample(group, rng))) for _ in range(paths)])


def dyson_simulate_many(n: int, T: float, dt: float, rng: np.random.Generator, paths: int,
                        initial: Optional[Sequence[float]] = None, time_rescale: bool = False) -> List[DysonPath]:
    """Euler-Maruyama for d theta_j = (1/n) sum cot((theta_j - theta_k)/2) dt + sqrt(2/n) dB_j."""
    if dt <= 0:
        raise PreconditionError(f"dt must be positive, got {dt}")
    if T < 0:
        raise PreconditionError(f"T must be non-negative, got {T}")
    steps = int(round(T / dt))
    if initial is None:
        theta = _haar_initial(n, paths, rng)
    else:
        theta = np.tile(np.sort(np.asarray(initial, dtype=float)), (paths, 1))
        if theta.shape[1] != n:
            raise PreconditionError(f"initial state has {theta.shape[1]} angles, expected {n}")
    stepper = _DysonStepper(n, rng, time_rescale)
    history = np.empty((steps + 1, paths, n))
    history[0] = theta
    for i in range(steps):
        theta = stepper.advance(theta, dt)
        history[i + 1] = theta
    times = np.arange(steps + 1) * dt
    if stepper.halvings:
        logger.info(f"Dyson n={n}: {stepper.halvings} step halvings over {steps} steps")
    return [DysonPath(n=n, times=times, angles=history[:, p, :], substeps=stepper.halvings) for p in range(paths)]


def dyson_simulate(n: int, T: float, dt: float, rng: np.random.Generator,
                   initial: Optional[Sequence[float]] = None, time_rescale: bool = False) -> DysonPath:
    return dyson_simulate_many(n, T, dt, rng, 1, initial, time_rescale)[0]


def two_time_cov(n: int, k: int, t: float) -> float:
    """E Tr U_t^k conj(Tr U_0^k) under stationarity."""
    if k < 1 or t < 0:
        raise PreconditionError("two_time_cov needs k >= 1 and t >= 0")
    small, big = min(k, n), max(k, n)
    if t == 0:
        return float(small)
    return math.exp(-k * big * t / n) * math.sinh(k * small * t / n) / math.sinh(k * t / n)


def spohn_linear_statistic(path: DysonPath, f: Dict[int, complex], t_index: int) -> complex:
    """xi_n(t, f) = sum_k f_k Tr U_t^k."""
    if f.get(0, 0) != 0:
        raise PreconditionError("linear statistic needs f_0 = 0")
    theta = np.asarray(path.angles)[t_index]
    return complex(sum(c * np.exp(1j * k * theta).sum() for k, c in f.items() if c != 0))


# ---------------------------------------------------------------------------
# Ornstein-Uhlenbeck coefficients of the limit field
# ---------------------------------------------------------------------------

def ou_simulate(k_max: int, T: float, dt: float, rng: np.random.Generator) -> OUFieldPath:
    """Exact transitions of dA_k = -k A_k dt + d(W_k + i W~_k), started stationary."""
    if dt <= 0 or k_max < 1:
        raise PreconditionError("ou_simulate needs dt > 0 and k_max >= 1")
    steps = int(round(T / dt))
    ks = np.arange(1, k_max + 1)
    sd = np.sqrt(1.0 / (2.0 * ks))
    decay = np.exp(-ks * dt)
    step_sd = np.sqrt((1.0 - decay ** 2) / (2.0 * ks))
    out = np.empty((steps + 1, k_max), dtype=complex)
    out[0] = sd * (rng.standard_normal(k_max) + 1j * rng.standard_normal(k_max))
    for i in range(steps):
        out[i + 1] = decay * out[i] + step_sd * (rng.standard_normal(k_max) + 1j * rng.standard_normal(k_max))
    return OUFieldPath(k_max=k_max, times=np.arange(steps + 1) * dt, coefficients=out)


def z_covariance(t: float, theta: float, t_prime: float, theta_prime: float, k_max: Optional[int] = None) -> float:
    """E Re Z(t, theta) Re Z(t', theta'); exact limit kernel, or its k_max truncation."""
    tau = abs(t - t_prime)
    phi = theta - theta_prime
    if k_max is None:
        num = max(math.exp(-t), math.exp(-t_prime))
        den = abs(math.exp(-t) * np.exp(1j * theta) - math.exp(-t_prime) * np.exp(1j * theta_prime))
        if den == 0:
            raise DomainError("Z covariance is infinite on the diagonal")
        return 0.5 * math.log(num / den)
    ks = np.arange(1, k_max + 1)
    return float(np.sum(np.exp(-ks * tau) * np.cos(ks * phi) / (2.0 * ks)))


# ---------------------------------------------------------------------------
# Sobolev tensor norms
# ---------------------------------------------------------------------------

def _trapezoid_weights(times: np.ndarray) -> np.ndarray:
    w = np.zeros_like(times)
    gaps = np.diff(times)
    w[:-1] += 0.5 * gaps
    w[1:] += 0.5 * gaps
    return w


def sobolev_from_modes(times: Sequence[float], modes: np.ndarray, ks: Sequence[int], s: float, eps: float) -> float:
    """||F||^2_{s,-eps} from Fourier modes F_k(t) (rows = times, columns = ks, k != 0)."""
    if not 0 <= s < 1:
        raise DomainError(f"time regularity s must lie in [0, 1), got {s}")
    if eps <= 0:
        raise DomainError(f"eps must be positive, got {eps}")
    times = np.asarray(times, dtype=float)
    modes = np.asarray(modes, dtype=complex)
    ks = np.abs(np.asarray(ks, dtype=float))
    weight = ks ** (-2.0 * eps)
    w = _trapezoid_weights(times)
    norms = (np.abs(modes) ** 2 * weight).sum(axis=1)
    total = float(np.dot(w, norms))
    if s == 0 or times.size < 3:
        return total

    scaled = modes * np.sqrt(weight)
    gram = (scaled @ scaled.conj().T).real
    dist = norms[:, None] + norms[None, :] - 2.0 * gram
    lag = np.abs(times[:, None] - times[None, :])
    dt = float(np.median(np.diff(times)))
    band = 2.0 * dt
    with np.errstate(divide="ignore"):
        kernel = np.where(lag >= band - 1e-12 * dt, lag ** (-1.0 - 2.0 * s), 0.0)
    total += float(w @ (np.maximum(dist, 0.0) * kernel) @ w)
    if s < 0.5:
        # local Holder estimate ||F(t) - F(u)||^2 ~ c |t - u| inside the band
        increments = np.maximum(np.diag(dist, 1), 0.0) / dt
        c = np.concatenate([increments, increments[-1:]])
        total += float(np.dot(w, c) * 2.0 * band ** (1.0 - 2.0 * s) / (1.0 - 2.0 * s))
    return total


def sobolev_norm(field: FieldGrid, s: float, eps: float, T: Optional[float] = None,
                 k_max: Optional[int] = None) -> float:
    """Squared tensor norm of a time x angle field via its angular Fourier modes."""
    if field.times is None:
        raise PreconditionError("sobolev_norm needs a field with a time axis")
    times = np.asarray(field.times, dtype=float)
    values = np.asarray(field.values)
    if T is not None:
        keep = times <= T + 1e-12
        times, values = times[keep], values[keep]
    k_max = k_max or (values.shape[-1] - 1) // 2
    modes = FieldGrid(theta=field.theta, values=values).fourier_modes(k_max)
    ks = np.arange(-k_max, k_max + 1)
    nonzero = ks != 0
    return sobolev_from_modes(times, modes[:, nonzero], ks[nonzero], s, eps)


def log_charpoly_path_norm(path: DysonPath, eps: float, s: float, k_max: int) -> float:
    """||log p_n||^2_{s,-eps} along the path; log p has modes -Tr U_t^k / k at frequency -k."""
    ks = np.arange(1, k_max + 1)
    modes = np.stack([-path.traces(k) / k for k in ks], axis=1)
    return sobolev_from_modes(path.times, modes, ks, s, eps)


def expected_log_charpoly_norm(n: int, eps: float, T: float, k_max: int) -> float:
    """T sum_{k<=k_max} k^{-2-2eps} min(k, n)."""
    ks = np.arange(1, k_max + 1)
    return float(T * np.sum(ks ** (-2.0 - 2.0 * eps) * np.minimum(ks, n)))
