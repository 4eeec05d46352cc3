# rmtlab/commands/det.py - Toeplitz and Toeplitz+Hankel determinants of configured symbols

import json
import math

import numpy as np
import pandas as pd

from rmtlab.models.detkit import FHSymbol, Symbol
from rmtlab.models.run_config import RunConfig
from rmtlab.services.detkit_service import (
    laurent_symbol, sigma_hat, sigma_symbol, single_singularity, th_det, toeplitz_det, trivial_symbol,
)
from rmtlab.commands.output import complex_columns
from rmtlab.utils.errors import ModeError


def build_symbol(config: RunConfig) -> Symbol:
    """trivial | fh | szego | sigma1..sigma5 | hat-sigma1..hat-sigma5, or a JSON document via symbol_file."""
    if config.symbol_file:
        with open(config.symbol_file, encoding="utf-8") as handle:
            return FHSymbol.from_document(json.load(handle))
    name = config.symbol
    if name == "trivial":
        return trivial_symbol()
    if name == "fh":
        return single_singularity(config.theta, config.alpha, config.beta_im)
    if name == "szego":
        # e^{alpha (z + 1/z)}
        return FHSymbol(V={1: config.alpha, -1: config.alpha})
    if name == "laurent":
        return laurent_symbol({0: 1.0, 1: config.alpha, -1: config.alpha})
    for prefix, builder in (("hat-sigma", sigma_hat), ("sigma", sigma_symbol)):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            return builder(int(name[len(prefix):]), config.alpha, config.beta_im, config.theta,
                           config.theta_prime, config.k)
    raise ModeError(f"unknown symbol {name!r}")


def run(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    sym = build_symbol(config)
    report = toeplitz_det(sym, config.n) if config.kappa is None else th_det(sym, config.n, config.kappa)
    row = {"n": report.n, "kappa": report.kappa if report.kappa is not None else 0}
    row.update(complex_columns("value", report.value))
    row.update(complex_columns("log", report.log_value))
    row["condition"] = report.condition if math.isfinite(report.condition) else float("inf")
    return pd.DataFrame([row])
