# rmtlab/services/charpoly_service.py - log p with its branch convention, truncated fields, grid fields

import math
from typing import Sequence

import numpy as np

from rmtlab.models.charpoly import FieldGrid, LogCharPolyField
from rmtlab.models.ensembles import EnsembleSample
from rmtlab.services.ensemble_service import full_spectrum, trace_powers
from rmtlab.utils.errors import PreconditionError

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


def im_log_factor(phi, theta):
    """Im log(1 - e^{i(phi - theta)}) with Im log 0 := pi/2."""
    phi = np.asarray(phi, dtype=float)
    theta = np.asarray(theta, dtype=float)
    half = 0.5 * (phi - theta)
    out = np.where(theta < phi, -HALF_PI + half, HALF_PI + half)
    return float(out) if out.ndim == 0 else out


def _log_charpoly_matrix(spectrum: np.ndarray, theta: np.ndarray) -> np.ndarray:
    diff = spectrum[None, :] - theta[:, None]
    with np.errstate(divide="ignore"):
        re = np.log(np.abs(2.0 * np.sin(0.5 * diff))).sum(axis=1)
    hit = np.any(diff == 0.0, axis=1)
    re = np.where(hit, -np.inf, re)
    im = im_log_factor(spectrum[None, :], theta[:, None]).sum(axis=1)
    return re + 1j * im


def log_charpoly(s: EnsembleSample, theta: float) -> complex:
    if not 0.0 <= theta < TWO_PI:
        raise PreconditionError(f"theta must lie in [0, 2pi), got {theta}")
    return complex(_log_charpoly_matrix(full_spectrum(s), np.array([theta]))[0])


def log_charpoly_grid(s: EnsembleSample, grid: Sequence[float]) -> LogCharPolyField:
    theta = np.asarray(grid, dtype=float)
    return LogCharPolyField(sample=s, theta=theta, values=_log_charpoly_matrix(full_spectrum(s), theta))


def truncated_field(s: EnsembleSample, theta, k: int, alpha: float, beta_im: float = 0.0):
    """f^{(k)}(theta) = exp(-sum_{j<=k} (Tr U^j / j)(2a cos j theta - 2i beta sin j theta)), beta = i * beta_im."""
    if k < 0:
        raise PreconditionError("truncation order must be non-negative")
    theta_arr = np.atleast_1d(np.asarray(theta, dtype=float))
    if k == 0:
        out = np.ones_like(theta_arr, dtype=complex)
    else:
        traces = trace_powers(s, k)
        js = np.arange(1, k + 1)
        angles = np.outer(theta_arr, js)
        weight = 2.0 * alpha * np.cos(angles) + 2.0 * beta_im * np.sin(angles)
        exponent = -(traces[None, :] * weight / js[None, :]).sum(axis=1)
        out = np.exp(exponent)
    return complex(out[0]) if np.ndim(theta) == 0 else out


def field_on_grid(s: EnsembleSample, grid: Sequence[float], alpha: float, beta_im: float = 0.0) -> FieldGrid:
    """f(theta) = |p(theta)|^{2a} e^{2i beta Im log p(theta)} with beta = i * beta_im."""
    if alpha <= -0.5:
        raise PreconditionError(f"alpha must exceed -1/2, got {alpha}")
    theta = np.asarray(grid, dtype=float)
    logp = _log_charpoly_matrix(full_spectrum(s), theta)
    on_spectrum = np.isneginf(logp.real)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        modulus = np.exp(2.0 * alpha * np.where(on_spectrum, 0.0, logp.real))
    if alpha > 0:
        modulus = np.where(on_spectrum, 0.0, modulus)
    elif alpha < 0:
        modulus = np.where(on_spectrum, np.inf, modulus)
    phase = np.exp(-2.0 * beta_im * logp.imag)
    values = modulus * phase
    return FieldGrid(theta=theta, values=values.astype(complex), infinite=np.isinf(values))
