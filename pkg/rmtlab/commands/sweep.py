# rmtlab/commands/sweep.py - One run of the target subcommand per axis value, in long format

import numpy as np
import pandas as pd

from rmtlab.models.numerics import RngStream
from rmtlab.models.run_config import RunConfig
from rmtlab.services.numerics_service import rng_generator
from rmtlab.utils.logger import logger


def run(config: RunConfig, rng: np.random.Generator, seed: int = 0) -> pd.DataFrame:
    from rmtlab.commands import COMMANDS

    base = config.model_dump()
    annotation = RunConfig.model_fields[config.axis].annotation
    frames = []
    for index, value in enumerate(config.values):
        update = dict(base, subcommand=config.target, output=None)
        update[config.axis] = int(value) if annotation in (int,) or str(annotation).endswith("[int]") else value
        child = RunConfig(**update)
        # stream 0 belongs to the parent run
        stream = rng_generator(RngStream(seed=seed, stream=index + 1))
        logger.info(f"sweep {config.target}: {config.axis}={update[config.axis]}")
        frame = COMMANDS[config.target](child, stream)
        frame = frame.drop(columns=[config.axis], errors="ignore")
        frame.insert(0, config.axis, update[config.axis])
        frames.append(frame)
    if not frames:
        return pd.DataFrame(columns=[config.axis])
    return pd.concat(frames, ignore_index=True)
