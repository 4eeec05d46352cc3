import argparse
import sys
from typing import Dict, List, Optional

from pydantic import ValidationError

from rmtlab.commands import COMMANDS
from rmtlab.commands import sweep
from rmtlab.commands.output import write_result
from rmtlab.config import settings
from rmtlab.models.numerics import RngStream
from rmtlab.models.run_config import SUBCOMMANDS, RunConfig, parse_key_values
from rmtlab.services.numerics_service import rng_generator
from rmtlab.utils.errors import RMTLabError
from rmtlab.utils.logger import logger

FIELDS = [name for name in RunConfig.model_fields if name != "subcommand"]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rmtlab", description="Characteristic polynomial experiments")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub = subparsers.add_parser(name)
        sub.add_argument("--config", help="key=value file; command-line flags override it")
        for field in FIELDS:
            info = RunConfig.model_fields[field]
            sub.add_argument(f"--{field.replace('_', '-')}", dest=field, default=argparse.SUPPRESS,
                             help=info.description)
    return parser


def load_config(argv: Optional[List[str]] = None) -> RunConfig:
    args = vars(build_parser().parse_args(argv))
    values: Dict[str, str] = {}
    path = args.pop("config", None)
    if path:
        with open(path, encoding="utf-8") as handle:
            values.update(parse_key_values(handle.readlines()))
    values.update(args)
    return RunConfig(**values)


def run(config: RunConfig) -> str:
    seed = config.seed if config.seed is not None else settings.seed
    rng = rng_generator(RngStream(seed=seed, stream=0))
    logger.info(f"Running {config.subcommand} with seed {seed}")
    if config.subcommand == "sweep":
        frame = sweep.run(config, rng, seed)
    else:
        frame = COMMANDS[config.subcommand](config, rng)
    return write_result(config, frame, seed)


def _log_validation(e: ValidationError) -> None:
    for err in e.errors():
        location = ".".join(str(part) for part in err["loc"]) or "config"
        logger.error(f"Invalid configuration: {location}: {err['msg']}")


def main(argv: Optional[List[str]] = None) -> int:
    try:
        config = load_config(argv)
    except ValidationError as e:
        _log_validation(e)
        return 1
    except OSError as e:
        logger.error(f"Could not read configuration: {e}")
        return 1

    try:
        text = run(config)
    except ValidationError as e:
        # parameters that pass RunConfig but not the service models (Group, MoMQuery, ...)
        _log_validation(e)
        return 1
    except RMTLabError as e:
        logger.error(f"{config.subcommand} failed: {e}", exc_info=True)
        return 2
    if not config.output:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
