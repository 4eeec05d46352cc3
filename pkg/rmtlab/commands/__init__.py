# rmtlab/commands/__init__.py - Subcommand registry

from rmtlab.commands import asym, det, gmc, identity_check, mom, painleve, sample, ubm, wick

COMMANDS = {
    "sample": sample.run,
    "det": det.run,
    "identity-check": identity_check.run,
    "asym": asym.run,
    "painleve": painleve.run,
    "mom": mom.run,
    "gmc": gmc.run,
    "ubm": ubm.run,
    "wick": wick.run,
}
