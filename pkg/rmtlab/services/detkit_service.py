# rmtlab/services/detkit_service.py - Symbol evaluation, Fourier tables, Toeplitz and Toeplitz+Hankel determinants

import math
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from rmtlab.models.detkit import (
    ConnectionReport,
    DetReport,
    FHSymbol,
    HeineSzegoReport,
    ReflectedSymbol,
    Singularity,
    Symbol,
)
from rmtlab.models.ensembles import Group, GroupKind
from rmtlab.models.numerics import QuadratureSpec
from rmtlab.services.ensemble_service import haar_matrix
from rmtlab.services.numerics_service import (
    eigenangles_unitary,
    fourier_coefficients,
    log_determinant,
    lu_determinant,
    toeplitz_moment_solve,
)
from rmtlab.utils.errors import DegeneracyError, DomainError, PoleError, PreconditionError
from rmtlab.utils.logger import logger

TWO_PI = 2.0 * math.pi
KAPPAS = (1, 2, 3, 4)
# (sign, shift) of the Hankel part f_{j+k+shift}
HANKEL_KERNEL = {1: (1.0, 0), 2: (-1.0, 2), 3: (-1.0, 1), 4: (1.0, 1)}
# prefactor and weight |1-z|^2a |1+z|^2b of the connection identities
CONNECTION = {1: (4.0, 0, 0), 2: (0.25, 1, 1), 3: (0.25, 1, 0), 4: (0.25, 0, 1)}


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def _fh_values(sym: FHSymbol, phi: np.ndarray, strict: bool = False) -> np.ndarray:
    z = np.exp(1j * phi)
    out = np.ones_like(phi, dtype=complex)
    if sym.V:
        out *= np.exp(sum(c * z ** k for k, c in sym.V))
    if sym.laurent:
        out *= sum(c * z ** k for k, c in sym.laurent)
    for s in sym.active_singularities:
        hit = phi == s.theta
        if strict and s.alpha <= 0 and np.any(hit):
            # alpha < 0 blows up; alpha = 0 with beta != 0 sits on the jump
            raise PoleError(f"symbol is singular at theta={s.theta} (alpha={s.alpha}, beta={s.beta})")
        with np.errstate(divide="ignore"):
            root = np.abs(z - np.exp(1j * s.theta)) ** (2.0 * s.alpha)
        beta = s.beta
        jump = np.where(phi < s.theta, np.exp(1j * math.pi * beta), np.exp(-1j * math.pi * beta))
        out *= root * np.exp(1j * beta * (phi - s.theta)) * jump
    return out


def symbol_values(sym: Symbol, phi, strict: bool = False) -> np.ndarray:
    phi = np.mod(np.asarray(phi, dtype=float), TWO_PI)
    if isinstance(sym, ReflectedSymbol):
        return _fh_values(sym.base, phi, strict) * _fh_values(sym.base, np.mod(TWO_PI - phi, TWO_PI), strict)
    return _fh_values(sym, phi, strict)


def symbol_eval(sym: Symbol, theta: float) -> complex:
    return complex(symbol_values(sym, np.array([theta]), strict=True)[0])


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------

def trivial_symbol() -> FHSymbol:
    return FHSymbol()


def laurent_symbol(coefficients: Dict[int, complex]) -> FHSymbol:
    return FHSymbol(laurent=coefficients)


def single_singularity(theta: float, alpha: float, beta_im: float = 0.0) -> FHSymbol:
    """hat sigma_5: the factor a single eigenvalue contributes to f(theta)."""
    return FHSymbol(singularities=[Singularity(theta=theta, alpha=alpha, beta_im=beta_im)])


def truncated_potential(theta: float, alpha: float, beta_im: float, k: int) -> Dict[int, complex]:
    # V_j = -(1/j)(2 alpha cos j theta - 2i beta sin j theta), beta = i beta_im
    return {j: -(2.0 * alpha * math.cos(j * theta) + 2.0 * beta_im * math.sin(j * theta)) / j for j in range(1, k + 1)}


def sigma_hat(index: int, alpha: float, beta_im: float, theta: float,
              theta_prime: Optional[float] = None, k: int = 0) -> FHSymbol:
    """The single-eigenvalue factors whose products over the spectrum give f and f^{(k)} products."""
    if index in (1, 2, 3) and theta_prime is None:
        raise PreconditionError(f"sigma_{index} needs two angles")
    if index == 4:
        return FHSymbol(V=truncated_potential(theta, alpha, beta_im, k))
    if index == 5:
        return single_singularity(theta, alpha, beta_im)
    if index == 1:
        v = truncated_potential(theta, alpha, beta_im, k)
        for j, c in truncated_potential(theta_prime, alpha, beta_im, k).items():
            v[j] = v.get(j, 0) + c
        return FHSymbol(V=v)
    if index == 2:
        return FHSymbol(V=truncated_potential(theta, alpha, beta_im, k),
                        singularities=[Singularity(theta=theta_prime, alpha=alpha, beta_im=beta_im)])
    if index == 3:
        if theta == theta_prime:
            return single_singularity(theta, 2 * alpha, 2 * beta_im)
        return FHSymbol(singularities=[Singularity(theta=theta, alpha=alpha, beta_im=beta_im),
                                       Singularity(theta=theta_prime, alpha=alpha, beta_im=beta_im)])
    raise DomainError(f"no sigma symbol with index {index}")


def sigma_symbol(index: int, alpha: float, beta_im: float, theta: float,
                 theta_prime: Optional[float] = None, k: int = 0) -> ReflectedSymbol:
    return ReflectedSymbol(base=sigma_hat(index, alpha, beta_im, theta, theta_prime, k))


# ---------------------------------------------------------------------------
# Fourier coefficients
# ---------------------------------------------------------------------------

def quadrature_spec(sym: Symbol) -> QuadratureSpec:
    exponents: Dict[float, float] = {}
    base = sym.base if isinstance(sym, ReflectedSymbol) else sym
    for s in base.active_singularities:
        locations = [s.theta]
        if isinstance(sym, ReflectedSymbol):
            locations.append((TWO_PI - s.theta) % TWO_PI)
        for theta in locations:
            exponents[theta] = exponents.get(theta, 0.0) + 2.0 * s.alpha
    keys = sorted(exponents)
    return QuadratureSpec(singularities=keys, exponents=[exponents[k] for k in keys])


def _exact_laurent(sym: Symbol) -> Optional[Dict[int, complex]]:
    base = sym.base if isinstance(sym, ReflectedSymbol) else sym
    if base.V or base.active_singularities:
        return None
    coeffs = base.laurent_dict
    if isinstance(sym, FHSymbol):
        return coeffs
    out: Dict[int, complex] = {}
    for a, ca in coeffs.items():
        for b, cb in coeffs.items():
            out[a - b] = out.get(a - b, 0j) + ca * cb
    return out


class CoefficientTable:
    """Read-only f_j for lo <= j <= hi; indices outside return 0 only for exact Laurent symbols."""

    def __init__(self, lo: int, values: np.ndarray, exact: Optional[Dict[int, complex]] = None):
        self.lo = lo
        self.hi = lo + len(values) - 1
        self.values = values
        self.exact = exact

    def __getitem__(self, j: int) -> complex:
        if self.exact is not None:
            return self.exact.get(j, 0j)
        if not self.lo <= j <= self.hi:
            raise IndexError(f"coefficient {j} outside cached range [{self.lo}, {self.hi}]")
        return self.values[j - self.lo]

    def array(self, js: np.ndarray) -> np.ndarray:
        if self.exact is not None:
            return np.array([self.exact.get(int(j), 0j) for j in np.ravel(js)], dtype=complex).reshape(np.shape(js))
        return self.values[np.asarray(js) - self.lo]


@lru_cache(maxsize=512)
def _coefficient_block(sym: Symbol, radius: int) -> np.ndarray:
    js = np.arange(-radius, radius + 1)
    spec = quadrature_spec(sym)
    values = fourier_coefficients(lambda phi: symbol_values(sym, phi), js, spec)
    values.setflags(write=False)
    return values


def fourier_table(sym: Symbol, lo: int, hi: int) -> CoefficientTable:
    exact = _exact_laurent(sym)
    if exact is not None:
        return CoefficientTable(lo, np.zeros(hi - lo + 1, dtype=complex), exact)
    radius = max(abs(lo), abs(hi))
    radius = 8 * math.ceil(radius / 8) if radius else 0
    return CoefficientTable(-radius, _coefficient_block(sym, radius))


# ---------------------------------------------------------------------------
# Determinants
# ---------------------------------------------------------------------------

def toeplitz_matrix(table: CoefficientTable, n: int) -> np.ndarray:
    j, k = np.indices((n, n))
    return table.array(j - k)


def th_matrix(table: CoefficientTable, n: int, kappa: int) -> np.ndarray:
    if kappa not in HANKEL_KERNEL:
        raise DomainError(f"kappa must be one of {KAPPAS}, got {kappa}")
    sign, shift = HANKEL_KERNEL[kappa]
    j, k = np.indices((n, n))
    return table.array(j - k) + sign * table.array(j + k + shift)


def _report(matrix: np.ndarray, n: int, kappa: Optional[int] = None) -> DetReport:
    if n == 0:
        return DetReport(n=0, value=1.0, log_value=0.0, kappa=kappa, condition=1.0)
    value = lu_determinant(matrix)
    return DetReport(n=n, value=value, log_value=log_determinant(matrix), kappa=kappa,
                     condition=float(np.linalg.cond(matrix)))


def toeplitz_det(sym: Symbol, n: int) -> DetReport:
    if n < 0:
        raise PreconditionError("determinant size must be non-negative")
    table = fourier_table(sym, -(n - 1), n - 1) if n else None
    return _report(toeplitz_matrix(table, n) if n else None, n)


def th_det(sym: Symbol, n: int, kappa: int) -> DetReport:
    if n < 0:
        raise PreconditionError("determinant size must be non-negative")
    if kappa not in HANKEL_KERNEL:
        raise DomainError(f"kappa must be one of {KAPPAS}, got {kappa}")
    if n == 0:
        return _report(None, 0, kappa)
    table = fourier_table(sym, -(n - 1), 2 * n)
    return _report(th_matrix(table, n, kappa), n, kappa)


# ---------------------------------------------------------------------------
# Exact identities
# ---------------------------------------------------------------------------

def heine_szego_check(sym: FHSymbol, n: int, samples: int, rng: np.random.Generator) -> HeineSzegoReport:
    """Monte Carlo E_{U(n)} prod_k f(e^{i theta_k}) against D_n(f)."""
    group = Group(kind=GroupKind.U, n=n)
    values = np.empty(samples, dtype=complex)
    for i in range(samples):
        matrix, _ = haar_matrix(group, rng)
        values[i] = np.prod(symbol_values(sym, eigenangles_unitary(matrix)))
    mean = complex(values.mean())
    se = float(values.real.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    det = toeplitz_det(sym, n).value
    gap = (mean - det).real
    z = 0.0 if se == 0.0 else gap / se
    logger.info(f"Heine-Szego n={n}: MC {mean.real:.6g} +/- {se:.2g} vs D_n {det.real:.6g} (z={z:.2f})")
    return HeineSzegoReport(n=n, samples=samples, mc_estimate=mean, standard_error=se, determinant=det, z_score=z)


def baik_rains_expectation(group: Group, h: FHSymbol) -> complex:
    """E_G det h(U) through Heine-Szego (U) or the Toeplitz+Hankel identities (real groups)."""
    size = group.matrix_size
    if group.kind == GroupKind.U:
        return toeplitz_det(h, size).value
    if group.kind == GroupKind.O:
        so = baik_rains_expectation(Group(kind=GroupKind.SO, n=size), h)
        sominus = baik_rains_expectation(Group(kind=GroupKind.SOMINUS, n=size), h)
        return 0.5 * (so + sominus)

    iota = ReflectedSymbol(base=h)
    if group.kind == GroupKind.SP:
        return th_det(iota, group.n, 2).value
    half = size // 2
    if group.kind == GroupKind.SO:
        if size == 0:
            return symbol_eval(h, 0.0)
        if size % 2 == 0:
            return 0.5 * th_det(iota, half, 1).value
        return symbol_eval(h, 0.0) * th_det(iota, half, 3).value
    if group.kind == GroupKind.SOMINUS:
        if size % 2 == 0:
            return symbol_eval(h, 0.0) * symbol_eval(h, math.pi) * th_det(iota, half - 1, 2).value
        return symbol_eval(h, math.pi) * th_det(iota, half, 4).value
    raise DomainError(f"unsupported group {group.label}")


def two_point_ratio(group: Group, alpha: float, beta_im: float, theta: float, theta_prime: float) -> float:
    """E f(theta) f(theta') / (E f(theta) E f(theta')) at finite n."""
    joint = baik_rains_expectation(group, sigma_hat(3, alpha, beta_im, theta, theta_prime))
    first = baik_rains_expectation(group, sigma_hat(5, alpha, beta_im, theta))
    second = baik_rains_expectation(group, sigma_hat(5, alpha, beta_im, theta_prime))
    return float((joint / (first * second)).real)


def _weighted(table: CoefficientTable, j: int, minus_one: int, plus_one: int) -> complex:
    # coefficients of f |1 - z|^{2a} |1 + z|^{2b}, a, b in {0, 1}
    if minus_one and plus_one:
        return 2 * table[j] - table[j - 2] - table[j + 2]
    if minus_one:
        return 2 * table[j] - table[j - 1] - table[j + 1]
    if plus_one:
        return 2 * table[j] + table[j - 1] + table[j + 1]
    return table[j]


def monic_opuc(coeff, m: int) -> np.ndarray:
    """Coefficients c_0..c_{m-1}, 1 of the monic degree-m orthogonal polynomial for coefficient map `coeff`."""
    if m == 0:
        return np.array([1.0 + 0j])
    column = np.array([coeff(l) for l in range(m)])
    row = np.array([coeff(-i) for i in range(m)])
    rhs = -np.array([coeff(l - m) for l in range(m)])
    c = toeplitz_moment_solve(column, row, rhs)
    return np.append(c, 1.0)


def orthopoly_connection_check(sym: Symbol, n: int) -> ConnectionReport:
    if not sym.is_even:
        raise PreconditionError("connection identities need an even symbol")
    if n < 1:
        raise PreconditionError("n must be at least 1")
    m = 2 * n
    table = fourier_table(sym, -(m + 2), m + 2)
    residuals, phis = {}, {}
    for kappa in KAPPAS:
        prefactor, a, b = CONNECTION[kappa]
        coeff = lambda j, a=a, b=b: _weighted(table, j, a, b)
        toeplitz = np.array([[coeff(j - k) for k in range(m)] for j in range(m)])
        d_2n = lu_determinant(toeplitz)
        if abs(d_2n) == 0:
            raise DegeneracyError("D_2n of the weighted symbol vanishes", {"kappa": kappa})
        poly = monic_opuc(coeff, m)
        at_zero = poly[0]
        at_one = np.sum(poly)
        at_minus_one = np.sum(poly * (-1.0) ** np.arange(m + 1))
        rhs = prefactor * (1 + at_zero) ** 2 / (at_one * at_minus_one) * d_2n
        lhs = th_det(sym, n, kappa).value ** 2
        residuals[kappa] = float(abs(lhs - rhs) / max(abs(lhs), 1e-300))
        phis[kappa] = (complex(at_zero), complex(at_one), complex(at_minus_one))
    logger.info(f"Connection identities at n={n}: residuals {residuals}")
    return ConnectionReport(n=n, residuals=residuals, phi_values=phis)
