# rmtlab/commands/mom.py - Moments-of-moments estimates and phase diagrams

import numpy as np
import pandas as pd

from rmtlab.config import settings
from rmtlab.models.mom import Estimator, MoMQuery
from rmtlab.models.run_config import RunConfig
from rmtlab.services.mom_service import mom_estimate, phase_classify, phase_table, subcritical_prediction
from rmtlab.utils.errors import DivergenceError, ModeError

COLUMNS = ["group", "n", "m", "alpha", "estimate", "se", "prediction", "phase"]


def _estimate(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    group = config.group_model
    query = MoMQuery(group=group, m=config.m, alpha=config.alpha, estimator=Estimator(config.estimator),
                     samples=config.samples or settings.default_samples, grid=config.grid)
    result = mom_estimate(query, rng)
    try:
        prediction = subcritical_prediction(group, config.m, config.alpha)
    except DivergenceError:
        prediction = float("nan")
    phase = phase_classify(group, config.m, config.alpha).phase.value if config.alpha > 0 else "trivial"
    row = {"group": group.label, "n": config.n, "m": config.m, "alpha": config.alpha,
           "estimate": result.estimate, "se": result.standard_error, "prediction": prediction, "phase": phase}
    return pd.DataFrame([row], columns=COLUMNS)


def run(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    mode = config.mode or "estimate"
    if mode == "estimate":
        return _estimate(config, rng)
    if mode == "phase":
        return phase_table(config.group_model, config.m, config.alphas or [config.alpha])
    raise ModeError(f"unknown mom mode {mode!r}", {"modes": "estimate, phase"})
