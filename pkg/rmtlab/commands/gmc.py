# rmtlab/commands/gmc.py - Truncated and random-matrix GMC measures and their mass moments

import numpy as np
import pandas as pd

from rmtlab.config import settings
from rmtlab.models.ensembles import GroupKind
from rmtlab.models.gmc import Normalization, ShiftSign
from rmtlab.models.run_config import RunConfig
from rmtlab.services.gmc_service import (
    expected_field, mass_growth, mass_moment, restriction_mask, rm_gmc, sample_field, truncated_gmc, uniform_grid,
)
from rmtlab.utils.errors import ModeError

SHIFTS = {GroupKind.U: ShiftSign.NONE, GroupKind.SP: ShiftSign.SYMPLECTIC}


def _measure_frame(theta, weights) -> pd.DataFrame:
    return pd.DataFrame({"theta": np.asarray(theta, dtype=float), "weight": np.asarray(weights, dtype=float)})


def _truncated(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    grid = uniform_grid(config.grid or 256)
    shift = SHIFTS.get(config.group, ShiftSign.ORTHOGONAL)
    fs = sample_field(config.k, rng, grid, shift)
    mu = truncated_gmc(fs, config.alpha, config.beta_im)
    return _measure_frame(mu.theta, mu.weights)


def _rm(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    group = config.group_model
    grid = uniform_grid(config.grid or 8 * max(group.matrix_size, 1))
    mu = rm_gmc(group, config.alpha, config.beta_im, grid, Normalization(config.normalization), rng,
                mc_samples=config.samples)
    return _measure_frame(mu.theta, mu.weights)


def _moment(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    """E (mass / 2pi)^m over random-matrix measures, optionally restricted to I_eps."""
    group = config.group_model
    grid = uniform_grid(config.grid or 8 * max(group.matrix_size, 1))
    normalization = Normalization(config.normalization)
    draws = config.samples or settings.default_samples
    expected = expected_field(group, config.alpha, config.beta_im, grid, normalization, rng, draws)
    if group.kind == GroupKind.U:
        # rotation invariance: E f is one constant on every shifted grid
        expected = np.full_like(expected, expected.mean())
    measures = [rm_gmc(group, config.alpha, config.beta_im, grid, normalization, rng, expected)
                for _ in range(draws)]
    mask = restriction_mask(grid, config.eps) if config.mode == "moment-restricted" else None
    estimate, se = mass_moment(measures, config.m, mask)
    return pd.DataFrame([{"group": group.label, "m": config.m, "alpha": config.alpha, "draws": draws,
                          "estimate": estimate, "se": se}])


def _growth(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    grid = uniform_grid(config.grid or 256)
    rows = mass_growth(config.alpha, config.m, config.ks or [config.k], config.samples or settings.default_samples,
                       grid, rng)
    return pd.DataFrame(rows, columns=["k", "estimate", "se"])


MODES = {"truncated": _truncated, "rm": _rm, "moment": _moment, "moment-restricted": _moment, "growth": _growth}


def run(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    mode = config.mode or "truncated"
    if mode not in MODES:
        raise ModeError(f"unknown gmc mode {mode!r}", {"modes": ", ".join(MODES)})
    return MODES[mode](config, rng)
