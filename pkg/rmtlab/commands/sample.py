# rmtlab/commands/sample.py - Haar or Metropolis eigenangle draws

import numpy as np
import pandas as pd

from rmtlab.models.run_config import RunConfig
from rmtlab.services.ensemble_service import metropolis_weyl, sample_many
from rmtlab.utils.errors import ModeError


def run(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    group = config.group_model
    count = config.samples or 1
    mode = config.mode or "haar"
    if mode == "haar":
        draws = sample_many(group, count, rng)
    elif mode == "metropolis":
        draws = metropolis_weyl(group, count + 100, rng).samples[:count]
    else:
        raise ModeError(f"unknown sample mode {mode!r}", {"modes": "haar, metropolis"})
    rows = []
    for index, s in enumerate(draws):
        for j, theta in enumerate(np.asarray(s.angles)):
            rows.append({"sample": index, "component": s.component.value, "j": j, "theta": float(theta)})
        for value in s.fixed:
            rows.append({"sample": index, "component": s.component.value, "j": -1, "theta": 0.0 if value == 1 else float(np.pi)})
    return pd.DataFrame(rows, columns=["sample", "component", "j", "theta"])
