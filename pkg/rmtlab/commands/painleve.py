# rmtlab/commands/painleve.py - Tabulated sigma-Painleve V solution with its residual

import numpy as np
import pandas as pd

from rmtlab.models.painleve import PainleveParams
from rmtlab.models.run_config import RunConfig
from rmtlab.services.painleve_service import residual, solve_sigma, to_frame


def run(config: RunConfig, rng: np.random.Generator) -> pd.DataFrame:
    params = PainleveParams(alpha1=config.alpha1, alpha2=config.alpha2,
                            beta1_im=config.beta1_im, beta2_im=config.beta2_im)
    sol = solve_sigma(params, config.x_max)
    frame = to_frame(sol)
    frame["residual"] = residual(sol)
    # the shooting horizon may extend past the requested range
    return frame[frame["x"] <= config.x_max].reset_index(drop=True)
