# rmtlab/commands/output.py - Result tables with a provenance header

import json
from typing import Dict

import pandas as pd

import rmtlab
from rmtlab.config import settings
from rmtlab.models.run_config import RunConfig, parse_key_values


def _scalar(value):
    return value.item() if hasattr(value, "item") else str(value)


def provenance(config: RunConfig, seed: int) -> Dict[str, str]:
    header = config.provenance()
    header["seed"] = str(seed)
    header["rmtlab_version"] = rmtlab.__version__
    return header


def render(config: RunConfig, frame: pd.DataFrame, seed: int) -> str:
    header = provenance(config, seed)
    if config.format == "json":
        document = {"provenance": header, "rows": frame.to_dict(orient="records")}
        return json.dumps(document, indent=2, sort_keys=True, default=_scalar) + "\n"
    lines = [f"# {key}={value}" for key, value in header.items()]
    body = frame.to_csv(index=False, float_format=settings.float_format, lineterminator="\n")
    return "\n".join(lines) + "\n" + body


def write_result(config: RunConfig, frame: pd.DataFrame, seed: int) -> str:
    text = render(config, frame, seed)
    if config.output:
        with open(config.output, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)
    return text


def config_from_header(text: str) -> RunConfig:
    """Rebuild the RunConfig echoed in a CSV or JSON artifact header."""
    if text.lstrip().startswith("{"):
        values = dict(json.loads(text)["provenance"])
    else:
        values = parse_key_values([line for line in text.splitlines() if line.startswith("#")])
    values.pop("rmtlab_version", None)
    return RunConfig(**values)


def complex_columns(name: str, value: complex) -> Dict[str, float]:
    value = complex(value)
    return {f"{name}_re": value.real, f"{name}_im": value.imag}
