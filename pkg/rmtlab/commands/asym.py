# rmtlab/commands/asym.py - Asymptotic predictions next to exact finite-n determinants

import math

import numpy as np
import pandas as pd

from rmtlab.commands.det import build_symbol
from rmtlab.models.asymptotics import AsymptoticPrediction, DiagnosticRow, MergingParams
from rmtlab.models.detkit import FHSymbol, Singularity
from rmtlab.models.run_config import RunConfig
from rmtlab.services.asymptotics_service import (
    claeys_envelope, diagnostic_table, dik_th, ehrhardt, merging_symbol, relation_gap, szego,
    uniform_th, uniform_toeplitz,
)
from rmtlab.services.detkit_service import th_det, toeplitz_det
from rmtlab.utils.errors import ModeError, PreconditionError


def _merging(config: RunConfig) -> MergingParams:
    return MergingParams(alpha0=config.alpha0, alpha3=config.alpha3, alpha1=config.alpha1, alpha2=config.alpha2,
                         beta1_im=config.beta1_im, beta2_im=config.beta2_im)


def _row(config: RunConfig, exact: complex, prediction: AsymptoticPrediction) -> DiagnosticRow:
    return DiagnosticRow(n=config.n, t=config.t, exact=complex(exact).real, predicted=prediction.value.real)


def _plain(config: RunConfig) -> FHSymbol:
    sym = build_symbol(config)
    if not isinstance(sym, FHSymbol):
        raise PreconditionError("asymptotic formulas take a plain symbol")
    return sym


def _needs_kappa(config: RunConfig) -> int:
    if config.kappa is None:
        raise PreconditionError(f"asym mode {config.mode!r} needs kappa")
    return config.kappa


def _szego(config: RunConfig) -> DiagnosticRow:
    sym = _plain(config)
    return _row(config, toeplitz_det(sym, config.n).value, szego(sym, config.n))


def _ehrhardt(config: RunConfig) -> DiagnosticRow:
    sym = _plain(config)
    return _row(config, toeplitz_det(sym, config.n).value, ehrhardt(sym, config.n))


def _dik(config: RunConfig) -> DiagnosticRow:
    sym, kappa = _plain(config), _needs_kappa(config)
    return _row(config, th_det(sym, config.n, kappa).value, dik_th(sym, config.n, kappa))


def _uniform_t(config: RunConfig) -> DiagnosticRow:
    params = _merging(config)
    sym = merging_symbol(config.p, config.t, params)
    return _row(config, toeplitz_det(sym, config.n).value, uniform_toeplitz(config.p, config.t, params, None, config.n))


def _uniform_th(config: RunConfig) -> DiagnosticRow:
    params, kappa = _merging(config), _needs_kappa(config)
    # the T+H symbol carries the upper pair and its mirror; the merging symbol already does
    sym = merging_symbol(config.p, config.t, params)
    prediction = uniform_th(config.p, config.t, params, None, config.n, kappa)
    return _row(config, th_det(sym, config.n, kappa).value, prediction)


def _envelope(config: RunConfig) -> DiagnosticRow:
    kappa = _needs_kappa(config)
    if len(config.thetas) != len(config.alphas):
        raise PreconditionError("thetas and alphas must have equal length")
    betas = [config.beta_im] * len(config.thetas)
    sing = []
    for th, a, b in zip(config.thetas, config.alphas, betas):
        sing.append(Singularity(theta=th, alpha=a, beta_im=b))
        sing.append(Singularity(theta=2.0 * math.pi - th, alpha=a, beta_im=-b))
    exact = th_det(FHSymbol(singularities=sing), config.n, kappa).value
    return _row(config, exact, claeys_envelope(config.thetas, config.alphas, betas, config.n, kappa))


MODES = {"szego": _szego, "ehrhardt": _ehrhardt, "dik": _dik, "uniform-t": _uniform_t,
         "uniform-th": _uniform_th, "envelope": _envelope}


def run(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    mode = config.mode or "szego"
    if mode == "relation":
        gap = relation_gap(_merging(config), config.p, config.t, config.n)
        return pd.DataFrame([{"n": config.n, "t": config.t, "gap_re": gap.real, "gap_im": gap.imag}])
    if mode not in MODES:
        raise ModeError(f"unknown asym mode {mode!r}", {"modes": ", ".join(list(MODES) + ["relation"])})
    return diagnostic_table([MODES[mode](config)])
