# rmtlab/commands/wick.py - Wick trace identity: exact right side against GUE x Haar Monte Carlo

import numpy as np
import pandas as pd

from rmtlab.models.run_config import RunConfig
from rmtlab.services.wick_service import wick_report
from rmtlab.utils.errors import PreconditionError


def run(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    if not config.sigma:
        raise PreconditionError("wick needs a non-empty sigma list")
    report = wick_report(config.sigma, config.n, config.samples or 200, rng)
    row = report.model_dump()
    row["sigma"] = ",".join(str(s) for s in report.sigma)
    row["exact_mode"] = int(report.exact_mode)
    return pd.DataFrame([row], columns=["j", "sigma", "n", "exact", "mc", "se", "exact_mode"])
