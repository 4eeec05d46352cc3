# rmtlab/services/ensemble_service.py - Haar sampling, Weyl densities and trace moments

import math
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import gammaln

from rmtlab.config import settings
from rmtlab.models.ensembles import EnsembleSample, Group, GroupKind, MetropolisRun
from rmtlab.services.numerics_service import eigenangles_unitary
from rmtlab.utils.errors import DomainError, PreconditionError
from rmtlab.utils.logger import logger

TWO_PI = 2.0 * math.pi
DOMAIN_SLACK = 1e-12


# ---------------------------------------------------------------------------
# Fixed-eigenvalue bookkeeping
# ---------------------------------------------------------------------------

def fixed_eigenvalues(component: GroupKind, size: int) -> List[int]:
    """Eigenvalues forced by the group: SO(odd) has +1, SO-(odd) has -1, SO-(even) has both."""
    if component == GroupKind.SO and size % 2 == 1:
        return [1]
    if component == GroupKind.SOMINUS:
        return [-1] if size % 2 == 1 else [1, -1]
    return []


def nontrivial_count(component: GroupKind, size: int) -> int:
    if component == GroupKind.U:
        return size
    if component == GroupKind.SP:
        return size // 2
    return (size - len(fixed_eigenvalues(component, size))) // 2


# ---------------------------------------------------------------------------
# Haar matrices
# ---------------------------------------------------------------------------

def _haar_unitary(size: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def _haar_orthogonal(size: int, rng: np.random.Generator) -> np.ndarray:
    z = rng.standard_normal((size, size))
    q, r = np.linalg.qr(z)
    return q * np.sign(np.diag(r))


def _haar_symplectic(n: int, rng: np.random.Generator) -> np.ndarray:
    # columns v_1..v_n, w_1..w_n with w_k = J^T conj(v_k), J = [[0, I], [-I, 0]]
    size = 2 * n
    z = (rng.standard_normal((size, n)) + 1j * rng.standard_normal((size, n))) / math.sqrt(2.0)
    v = np.zeros((size, n), dtype=complex)
    w = np.zeros((size, n), dtype=complex)
    for k in range(n):
        u = z[:, k].copy()
        for _ in range(2):
            basis = np.concatenate([v[:, :k], w[:, :k]], axis=1)
            u = u - basis @ (basis.conj().T @ u)
        u /= np.linalg.norm(u)
        v[:, k] = u
        w[:, k] = np.concatenate([-u[n:].conj(), u[:n].conj()])
    return np.concatenate([v, w], axis=1)


def resolve_component(group: Group, rng: np.random.Generator) -> GroupKind:
    if group.kind != GroupKind.O:
        return group.kind
    return GroupKind.SO if rng.random() < 0.5 else GroupKind.SOMINUS


def haar_matrix(group: Group, rng: np.random.Generator) -> Tuple[np.ndarray, GroupKind]:
    """A Haar-distributed matrix from `group` and the component it landed in."""
    component = resolve_component(group, rng)
    size = group.matrix_size
    if component == GroupKind.U:
        return _haar_unitary(size, rng), component
    if component == GroupKind.SP:
        return _haar_symplectic(group.n, rng), component
    if size == 0:
        return np.zeros((0, 0)), component
    q = _haar_orthogonal(size, rng)
    det = np.linalg.det(q)
    if (component == GroupKind.SO and det < 0) or (component == GroupKind.SOMINUS and det > 0):
        q[:, 0] = -q[:, 0]
    return q, component


# ---------------------------------------------------------------------------
# Spectra
# ---------------------------------------------------------------------------

def _fold_pairs(theta: np.ndarray) -> np.ndarray:
    folded = np.sort(np.minimum(theta, TWO_PI - theta))
    return 0.5 * (folded[0::2] + folded[1::2])


def sample_from_angles(group: Group, component: GroupKind, theta: np.ndarray) -> EnsembleSample:
    """Split a full eigenangle list into nontrivial angles and fixed eigenvalues."""
    theta = np.sort(np.asarray(theta, dtype=float))
    if component == GroupKind.U:
        return EnsembleSample(group=group, component=component, angles=theta, fixed=[])
    fixed = fixed_eigenvalues(component, group.matrix_size)
    remaining = theta.copy()
    for value in fixed:
        distance = np.abs(np.exp(1j * remaining) - value)
        remaining = np.delete(remaining, int(np.argmin(distance)))
    return EnsembleSample(group=group, component=component, angles=_fold_pairs(remaining), fixed=fixed)


def sample(group: Group, rng: np.random.Generator) -> EnsembleSample:
    matrix, component = haar_matrix(group, rng)
    if group.matrix_size == 0:
        return EnsembleSample(group=group, component=component, angles=np.zeros(0), fixed=[])
    theta = eigenangles_unitary(matrix, settings.unitary_tol)
    return sample_from_angles(group, component, theta)


def sample_many(group: Group, count: int, rng: np.random.Generator) -> List[EnsembleSample]:
    logger.info(f"Sampling {count} Haar draws from {group.label}")
    return [sample(group, rng) for _ in range(count)]


def full_spectrum(s: EnsembleSample) -> np.ndarray:
    """All eigenangles in [0, 2pi), closed under conjugation for the real groups."""
    if s.is_unitary:
        return np.asarray(s.angles, dtype=float)
    phi = np.asarray(s.angles, dtype=float)
    fixed = [0.0 if v == 1 else math.pi for v in s.fixed]
    spectrum = np.concatenate([phi, np.mod(TWO_PI - phi, TWO_PI), np.asarray(fixed)])
    return np.sort(spectrum)


def trace_powers(s: EnsembleSample, k_max: int) -> np.ndarray:
    """Tr U^k for k = 1..k_max computed from the eigenangles."""
    theta = full_spectrum(s)
    ks = np.arange(1, k_max + 1)
    return np.exp(1j * np.outer(ks, theta)).sum(axis=1)


# ---------------------------------------------------------------------------
# Weyl integration formulae
# ---------------------------------------------------------------------------

def _vandermonde_cos(theta: np.ndarray) -> float:
    c = 2.0 * np.cos(theta)
    diff = c[None, :] - c[:, None]
    iu = np.triu_indices(len(theta), 1)
    return float(np.sum(np.log(diff[iu] ** 2))) if len(theta) > 1 else 0.0


def log_weyl_density(group: Group, angles: Sequence[float], component: Optional[GroupKind] = None) -> float:
    component = component or group.kind
    if component == GroupKind.O:
        raise DomainError("O(n) has no single Weyl density; pass the SO or SOminus component")
    size = group.matrix_size
    theta = np.asarray(angles, dtype=float)
    expected = nontrivial_count(component, size)
    if theta.size != expected:
        raise DomainError(f"{group.label} expects {expected} nontrivial angles, got {theta.size}")
    if size == 0:
        raise DomainError("SO(0) has no angles to weigh")

    if component == GroupKind.U:
        if np.any(theta < 0) or np.any(theta >= TWO_PI + DOMAIN_SLACK):
            raise DomainError("unitary angles must lie in [0, 2pi)")
        z = np.exp(1j * theta)
        iu = np.triu_indices(size, 1)
        with np.errstate(divide="ignore"):
            pair = np.sum(np.log(np.abs(z[:, None] - z[None, :])[iu] ** 2)) if size > 1 else 0.0
        return float(pair - gammaln(size + 1) - size * math.log(TWO_PI))

    if np.any(theta < -DOMAIN_SLACK) or np.any(theta > math.pi + DOMAIN_SLACK):
        raise DomainError("nontrivial angles must lie in [0, pi]")
    m = expected
    with np.errstate(divide="ignore"):
        pair = _vandermonde_cos(theta)
        if component == GroupKind.SO and size % 2 == 0:
            return float(math.log(2.0) - gammaln(m + 1) - m * math.log(TWO_PI) + pair)
        log_norm = m * math.log(2.0) - gammaln(m + 1) - m * math.log(math.pi)
        if component == GroupKind.SO:
            single = np.sum(np.log(np.sin(theta / 2.0) ** 2))
        elif component == GroupKind.SOMINUS and size % 2 == 1:
            single = np.sum(np.log(np.cos(theta / 2.0) ** 2))
        else:
            # Sp(2m) and SO-(2m+2) share a density
            single = np.sum(np.log(np.sin(theta) ** 2))
    return float(log_norm + single + pair)


def weyl_density(group: Group, angles: Sequence[float], component: Optional[GroupKind] = None) -> float:
    return math.exp(log_weyl_density(group, angles, component))


def metropolis_weyl(group: Group, steps: int, rng: np.random.Generator, burn_in: int = 100) -> MetropolisRun:
    """Systematic-scan Metropolis chain with the Weyl density as stationary law.

    One step is a sweep over all coordinates; a sample is recorded after each
    post-burn-in sweep.
    """
    if group.kind == GroupKind.O:
        raise DomainError("run the chain on SO or SOminus; O(n) mixes components of different dimension")
    if steps < burn_in:
        raise PreconditionError(f"steps ({steps}) must be at least the burn-in ({burn_in})")
    component = group.kind
    m = nontrivial_count(component, group.matrix_size)
    unitary = component == GroupKind.U
    width = math.pi / math.sqrt(max(m, 1))
    theta = rng.uniform(0.0, TWO_PI if unitary else math.pi, size=m)
    log_p = log_weyl_density(group, theta, component)
    proposed = accepted = 0
    kept: List[EnsembleSample] = []
    fixed = fixed_eigenvalues(component, group.matrix_size)

    for sweep in range(steps):
        for j in range(m):
            candidate = theta.copy()
            step = theta[j] + width * rng.standard_normal()
            if unitary:
                candidate[j] = np.mod(step, TWO_PI)
            else:
                candidate[j] = math.pi - abs(math.pi - np.mod(step, TWO_PI))
            log_q = log_weyl_density(group, candidate, component)
            proposed += 1
            if math.log(rng.random() + 1e-300) < log_q - log_p:
                theta, log_p = candidate, log_q
                accepted += 1
        if sweep >= burn_in:
            kept.append(EnsembleSample(group=group, component=component, angles=np.sort(theta), fixed=fixed))

    rate = accepted / proposed if proposed else 1.0
    logger.info(f"Metropolis on {group.label}: {len(kept)} samples, acceptance {rate:.3f}")
    return MetropolisRun(group=group, samples=kept, acceptance_rate=rate)


# ---------------------------------------------------------------------------
# Trace moments
# ---------------------------------------------------------------------------

def ds_trace_moment(a: Sequence[int], b: Sequence[int], n: int) -> Optional[float]:
    """Exact E prod (Tr U^k)^{a_k} conj(Tr U^k)^{b_k} over U(n).

    Returns None when max(sum k a_k, sum k b_k) > n; callers then fall back
    to Monte Carlo.
    """
    length = max(len(a), len(b))
    a = list(a) + [0] * (length - len(a))
    b = list(b) + [0] * (length - len(b))
    deg_a = sum((k + 1) * x for k, x in enumerate(a))
    deg_b = sum((k + 1) * x for k, x in enumerate(b))
    if deg_a != deg_b:
        return 0.0
    if deg_a > n:
        return None
    if a != b:
        return 0.0
    return float(math.prod((k + 1) ** x * math.factorial(x) for k, x in enumerate(a)))


def diaconis_evans_mean(kind: GroupKind, k: int) -> float:
    """Limit of E Tr U^k: 0 on U, eta_k on O, -eta_k on Sp (eta_k = 1 iff k even)."""
    if kind == GroupKind.U:
        return 0.0
    eta = 1.0 if k % 2 == 0 else 0.0
    if kind == GroupKind.SP:
        return -eta
    if kind == GroupKind.O:
        return eta
    raise DomainError("the trace mean limit is stated for U, O and Sp")
