# rmtlab/services/numerics_service.py - Dense linear algebra, quadrature, special functions, ODEs, RNG

import math
from functools import lru_cache
from typing import Callable, Iterable, Optional, Sequence

import mpmath
import numpy as np
from scipy import linalg
from scipy.integrate import solve_ivp
from scipy.special import roots_jacobi

from rmtlab.models.numerics import QuadratureSpec, RngStream, OdeSolution
from rmtlab.utils.errors import (
    AccuracyError,
    DegeneracyError,
    DimensionError,
    DomainError,
    IntegrationError,
    NumericalError,
    PreconditionError,
)
from rmtlab.utils.logger import logger

TWO_PI = 2.0 * math.pi
EXTENDED_ACCUMULATION_SIZE = 64
MAX_PANEL_LENGTH = math.pi / 4
BASE_NODES = 24
SMOOTH_FFT_MIN = 512


def _square(M) -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {A.shape}")
    return A


# ---------------------------------------------------------------------------
# Determinants
# ---------------------------------------------------------------------------

def lu_determinant(M) -> complex:
    A = _square(M)
    if not np.all(np.isfinite(A)):
        raise PreconditionError("matrix has non-finite entries")
    n = A.shape[0]
    if n == 0:
        return 1.0 + 0.0j
    if not np.any(np.tril(A, -1)) or not np.any(np.triu(A, 1)):
        return complex(np.prod(np.diag(A)))

    lu, piv = linalg.lu_factor(A, check_finite=False)
    diag = np.diag(lu)
    sign = -1.0 if np.count_nonzero(piv != np.arange(n)) % 2 else 1.0
    if n <= EXTENDED_ACCUMULATION_SIZE:
        return complex(sign * np.prod(diag))
    if np.any(diag == 0):
        return 0.0 + 0.0j
    log_abs = math.fsum(np.log(np.abs(diag)))
    phase = math.fsum(np.angle(diag))
    return complex(sign * np.exp(log_abs + 1j * phase))


def log_determinant(M) -> complex:
    """log det with fsum-accumulated pivots; imaginary part is the summed pivot phase (not reduced)."""
    A = _square(M)
    n = A.shape[0]
    if n == 0:
        return 0.0 + 0.0j
    lu, piv = linalg.lu_factor(A, check_finite=False)
    diag = np.diag(lu)
    if np.any(diag == 0):
        return complex(-np.inf, 0.0)
    phase = math.fsum(np.angle(diag))
    if np.count_nonzero(piv != np.arange(n)) % 2:
        phase += math.pi
    return complex(math.fsum(np.log(np.abs(diag))), phase)


# ---------------------------------------------------------------------------
# Unitary spectra
# ---------------------------------------------------------------------------

def eigenangles_unitary(U, tol: float = 1e-8) -> np.ndarray:
    A = _square(U)
    n = A.shape[0]
    defect = np.max(np.abs(A.conj().T @ A - np.eye(n))) if n else 0.0
    if defect > tol:
        raise PreconditionError("matrix is not unitary within tolerance", {"defect": float(defect), "tol": tol})
    try:
        # LAPACK zgeev: Hessenberg reduction then shifted QR with deflation
        lam = np.linalg.eigvals(A)
    except np.linalg.LinAlgError as e:
        logger.error(f"Eigenvalue iteration failed for {n}x{n} unitary: {e}", exc_info=True)
        raise NumericalError(f"eigensolver did not converge: {e}")
    theta = np.mod(np.angle(lam), TWO_PI)
    theta[theta >= TWO_PI - 1e-12] = 0.0
    return np.sort(theta)


# ---------------------------------------------------------------------------
# Special functions
# ---------------------------------------------------------------------------

def log_barnes_g(x: float) -> float:
    if not x > 0:
        raise DomainError(f"log_barnes_g needs x > 0, got {x}")
    with mpmath.workdps(30):
        return float(mpmath.log(mpmath.barnesg(x)))


def log_barnes_g_pair(a: float, b_im: float) -> float:
    """log(G(a + i b) G(a - i b)) = 2 log|G(a + i b)|, real for real a."""
    if b_im == 0:
        return 2.0 * log_barnes_g(a)
    with mpmath.workdps(30):
        value = mpmath.barnesg(mpmath.mpc(a, b_im))
        if value == 0:
            raise DomainError(f"G vanishes at {a} + {b_im}i")
        return float(2 * mpmath.log(abs(value)))


# ---------------------------------------------------------------------------
# Fourier coefficients on the unit circle
# ---------------------------------------------------------------------------

@lru_cache(maxsize=256)
def _jacobi_rule(nodes: int, a_exp: float, b_exp: float):
    # weight (1 - x)^a_exp (1 + x)^b_exp on [-1, 1]
    x, w = roots_jacobi(nodes, a_exp, b_exp)
    return x, w


def _graded_breaks(a: float, b: float, left_gap: float, right_gap: float) -> list:
    """Break points refining geometrically toward both panel ends."""
    length = b - a
    breaks = {a, b}
    for start, gap, direction in ((a, left_gap, 1.0), (b, right_gap, -1.0)):
        h = min(gap, length / 4.0)
        while h < length / 2.0:
            breaks.add(start + direction * h)
            h *= 2.0
    ordered = sorted(breaks)
    refined = [ordered[0]]
    for lo, hi in zip(ordered[:-1], ordered[1:]):
        pieces = max(1, math.ceil((hi - lo) / MAX_PANEL_LENGTH))
        refined.extend(lo + (hi - lo) * np.arange(1, pieces + 1) / pieces)
    return refined


def _composite_rule(spec: QuadratureSpec, max_index: int, extra_nodes: int):
    """Nodes and weights on [0, 2pi) with Jacobi weights absorbing the endpoint powers."""
    sing = list(spec.singularities)
    expo = list(spec.exponents)
    if len(sing) == 1:
        points = [sing[0], sing[0] + TWO_PI]
        pows = [expo[0], expo[0]]
    else:
        points = sing + [sing[0] + TWO_PI]
        pows = expo + [expo[0]]
    gaps = np.diff(points)

    thetas, weights = [], []
    for idx in range(len(points) - 1):
        a, b = points[idx], points[idx + 1]
        left_gap = gaps[idx - 1] if len(gaps) > 1 else gaps[idx]
        right_gap = gaps[(idx + 1) % len(gaps)]
        breaks = _graded_breaks(a, b, left_gap, right_gap)
        for k, (lo, hi) in enumerate(zip(breaks[:-1], breaks[1:])):
            ea = pows[idx] if k == 0 else 0.0
            eb = pows[idx + 1] if k == len(breaks) - 2 else 0.0
            count = BASE_NODES + extra_nodes + math.ceil(0.75 * max_index * (hi - lo))
            if count > spec.max_subdivisions:
                raise AccuracyError("node cap reached before the Fourier coefficients converged",
                                    {"nodes": count, "cap": spec.max_subdivisions})
            x, w = _jacobi_rule(count, eb, ea)
            half = 0.5 * (hi - lo)
            with np.errstate(divide="ignore"):
                weight_fn = (1.0 - x) ** eb * (1.0 + x) ** ea
            thetas.append(lo + half * (1.0 + x))
            weights.append(half * w / weight_fn)
    theta = np.mod(np.concatenate(thetas), TWO_PI)
    return theta, np.concatenate(weights)


def _smooth_coefficients(f: Callable, js: np.ndarray) -> np.ndarray:
    size = SMOOTH_FFT_MIN
    jmax = int(np.max(np.abs(js))) if js.size else 0
    while size < 4 * jmax + 64:
        size *= 2
    previous = None
    for _ in range(6):
        theta = TWO_PI * np.arange(size) / size
        coeffs = np.fft.fft(np.broadcast_to(np.asarray(f(theta), dtype=complex), theta.shape)) / size
        current = coeffs[np.mod(js, size)]
        if previous is not None and np.max(np.abs(current - previous)) < 1e-14 * max(1.0, np.max(np.abs(current))):
            return current
        previous = current
        size *= 2
    return previous


def fourier_coefficients(f: Callable, indices: Iterable[int], spec: Optional[QuadratureSpec] = None) -> np.ndarray:
    """f_j = (1/2pi) int f(e^{i theta}) e^{-i j theta} d theta for every requested j.

    `f` must accept a numpy array of angles. Without listed singularities the
    symbol is treated as smooth and sampled by FFT; otherwise composite
    Gauss-Jacobi panels are split at the singularities and refined until two
    successive node counts agree.
    """
    spec = spec or QuadratureSpec()
    js = np.asarray(list(indices), dtype=np.int64)
    if js.size == 0:
        return np.zeros(0, dtype=complex)
    if not spec.singularities:
        return _smooth_coefficients(f, js)

    max_index = int(np.max(np.abs(js)))
    extra = 0
    previous = None
    diff = float("inf")
    while True:
        theta, weight = _composite_rule(spec, max_index, extra)
        values = np.broadcast_to(np.asarray(f(theta), dtype=complex), theta.shape) * weight
        current = np.exp(-1j * np.outer(js, theta)) @ values / TWO_PI
        if previous is not None:
            diff = float(np.max(np.abs(current - previous)))
            if diff <= max(spec.abs_tol, spec.rel_tol * np.max(np.abs(current))):
                return current
        previous = current
        extra = extra + BASE_NODES if extra else BASE_NODES // 2
        if BASE_NODES + extra > spec.max_subdivisions:
            raise AccuracyError("Fourier quadrature did not converge", {"achieved": diff})


def fourier_coefficient(f: Callable, j: int, spec: Optional[QuadratureSpec] = None) -> complex:
    return complex(fourier_coefficients(f, [j], spec)[0])


# ---------------------------------------------------------------------------
# ODE integration
# ---------------------------------------------------------------------------

def ode_solve(rhs: Callable, x0: float, x1: float, y0: Sequence[float], tol: float = 1e-10,
              method: str = "DOP853", events=None) -> OdeSolution:
    if not x0 < x1:
        raise PreconditionError(f"ode_solve needs x0 < x1, got {x0} >= {x1}")
    sol = solve_ivp(rhs, (x0, x1), np.asarray(y0, dtype=float), method=method,
                    rtol=tol, atol=tol * 1e-2, dense_output=True, events=events)
    if sol.status == -1:
        last = float(sol.t[-1]) if sol.t.size else x0
        logger.error(f"ODE integration stopped at x={last}: {sol.message}")
        raise IntegrationError(f"integration failed: {sol.message}", {"last_x": last})
    return OdeSolution(x=sol.t, y=sol.y, interpolant=sol.sol, nfev=int(sol.nfev))


# ---------------------------------------------------------------------------
# Linear solves and RNG
# ---------------------------------------------------------------------------

def toeplitz_moment_solve(column, row, rhs) -> np.ndarray:
    """Solve T x = rhs for Toeplitz T given its first column and row (Levinson, dense fallback)."""
    column = np.asarray(column, dtype=complex)
    row = np.asarray(row, dtype=complex)
    rhs = np.asarray(rhs, dtype=complex)
    try:
        x = linalg.solve_toeplitz((column, row), rhs)
        if np.all(np.isfinite(x)):
            return x
    except (linalg.LinAlgError, ValueError) as e:
        logger.warning(f"Levinson recursion failed ({e}); using dense solve")
    try:
        return linalg.solve(linalg.toeplitz(column, row), rhs)
    except linalg.LinAlgError as e:
        raise DegeneracyError(f"singular Toeplitz moment system: {e}")


def rng_generator(stream: RngStream) -> np.random.Generator:
    seq = np.random.SeedSequence(stream.seed, spawn_key=(stream.stream,))
    return np.random.Generator(np.random.Philox(seq))
