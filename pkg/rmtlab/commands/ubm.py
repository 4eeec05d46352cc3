# rmtlab/commands/ubm.py - Dyson paths, OU coefficient paths and Sobolev norm diagnostics

import math

import numpy as np
import pandas as pd

from rmtlab.config import settings
from rmtlab.models.run_config import RunConfig
from rmtlab.services.ubm_service import (
    dyson_simulate, dyson_simulate_many, expected_log_charpoly_norm, log_charpoly_path_norm, ou_simulate,
    two_time_cov,
)
from rmtlab.utils.errors import ModeError


def _mean_se(values: np.ndarray):
    se = float(values.std(ddof=1) / math.sqrt(values.size)) if values.size > 1 else 0.0
    return float(values.mean()), se


def _dyson(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    return dyson_simulate(config.n, config.T, config.dt, rng, time_rescale=config.time_rescale).to_frame()


def _ou(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    path = ou_simulate(config.k, config.T, config.dt, rng)
    coefficients = np.asarray(path.coefficients)
    rows = []
    for i, t in enumerate(np.asarray(path.times)):
        for k in range(1, path.k_max + 1):
            a = coefficients[i, k - 1]
            rows.append({"t": float(t), "k": k, "re": a.real, "im": a.imag})
    return pd.DataFrame(rows, columns=["t", "k", "re", "im"])


def _two_time(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    paths = dyson_simulate_many(config.n, config.T, config.dt, rng, config.samples or 200,
                                time_rescale=config.time_rescale)
    k = max(config.k, 1)
    values = np.array([(p.traces(k)[-1] * np.conj(p.traces(k)[0])).real for p in paths])
    mc, se = _mean_se(values)
    t = float(paths[0].times[-1])
    exact = two_time_cov(config.n, k, 0.5 * t if config.time_rescale else t)
    return pd.DataFrame([{"n": config.n, "k": k, "t": t, "mc": mc, "se": se, "exact": exact}])


def _sobolev(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    k_max = max(config.k, 1)
    paths = dyson_simulate_many(config.n, config.T, config.dt, rng, config.samples or settings.default_samples,
                                time_rescale=config.time_rescale)
    values = np.array([log_charpoly_path_norm(p, config.eps, config.s, k_max) for p in paths])
    mc, se = _mean_se(values)
    expected = expected_log_charpoly_norm(config.n, config.eps, config.T, k_max) if config.s == 0 else float("nan")
    return pd.DataFrame([{"n": config.n, "s": config.s, "eps": config.eps, "T": config.T, "k_max": k_max,
                          "mc": mc, "se": se, "expected": expected}])


MODES = {"dyson": _dyson, "ou": _ou, "two-time": _two_time, "sobolev": _sobolev}


def run(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    mode = config.mode or "dyson"
    if mode not in MODES:
        raise ModeError(f"unknown ubm mode {mode!r}", {"modes": ", ".join(MODES)})
    return MODES[mode](config, rng)
