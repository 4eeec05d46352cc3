# rmtlab/commands/identity_check.py - Monte Carlo and algebraic cross-checks of the exact identities

import math

import numpy as np
import pandas as pd

from rmtlab.commands.det import build_symbol
from rmtlab.commands.output import complex_columns
from rmtlab.config import settings
from rmtlab.models.detkit import FHSymbol
from rmtlab.models.run_config import RunConfig
from rmtlab.services.detkit_service import (
    baik_rains_expectation, heine_szego_check, orthopoly_connection_check, symbol_values,
)
from rmtlab.services.ensemble_service import full_spectrum, sample
from rmtlab.utils.errors import ModeError, PreconditionError
from rmtlab.utils.logger import logger


def _plain(config: RunConfig) -> FHSymbol:
    sym = build_symbol(config)
    if not isinstance(sym, FHSymbol):
        raise PreconditionError(f"{config.mode} check needs a plain (non-reflected) symbol")
    return sym


def _heine_szego(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    report = heine_szego_check(_plain(config), config.n, config.samples or settings.default_samples, rng)
    row = {"n": report.n, "samples": report.samples}
    row.update(complex_columns("mc", report.mc_estimate))
    row["se"] = report.standard_error
    row.update(complex_columns("exact", report.determinant))
    row["z"] = report.z_score
    return pd.DataFrame([row])


def _baik_rains(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    sym = _plain(config)
    group = config.group_model
    count = config.samples or settings.default_samples
    values = np.array([np.prod(symbol_values(sym, full_spectrum(sample(group, rng)))) for _ in range(count)])
    exact = baik_rains_expectation(group, sym)
    se = float(values.real.std(ddof=1) / math.sqrt(count)) if count > 1 else 0.0
    z = 0.0 if se == 0 else float((values.real.mean() - exact.real) / se)
    logger.info(f"Baik-Rains {group.label}: MC {values.real.mean():.6g} +/- {se:.2g} vs exact {exact.real:.6g}")
    row = {"group": group.label, "samples": count}
    row.update(complex_columns("mc", complex(values.mean())))
    row["se"] = se
    row.update(complex_columns("exact", exact))
    row["z"] = z
    return pd.DataFrame([row])


def _connection(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    report = orthopoly_connection_check(build_symbol(config), config.n)
    rows = []
    for kappa, res in sorted(report.residuals.items()):
        phi0, phi1, phim1 = report.phi_values[kappa]
        rows.append({"n": report.n, "kappa": kappa, "residual": res,
                     "phi_0": complex(phi0).real, "phi_1": complex(phi1).real, "phi_m1": complex(phim1).real})
    return pd.DataFrame(rows)


MODES = {"heine-szego": _heine_szego, "baik-rains": _baik_rains, "connection": _connection}


def run(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    mode = config.mode or "heine-szego"
    if mode not in MODES:
        raise ModeError(f"unknown identity-check mode {mode!r}", {"modes": ", ".join(MODES)})
    return MODES[mode](config, rng)
