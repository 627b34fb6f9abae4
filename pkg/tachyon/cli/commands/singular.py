"""
`singular` and `nroots`: the eigenvalue table and the root-count staircase
"""
import argparse

from tachyon.cli import deps
from tachyon.core.config import settings
from tachyon.core.exceptions import ConfigurationError
from tachyon.core.logging import get_logger
from tachyon.services.export_service import ExportService
from tachyon.services.nullcone_service import NullconeService

logger = get_logger(__name__)


def cmd_singular(args: argparse.Namespace) -> int:
    """Write the first `count` singular velocities, one per line"""
    config = deps.load_run_config(args)
    count = int(deps.option(args, config, "count", 15))
    digits = int(deps.option(args, config, "digits", settings.START_DIGITS))
    if count < 1:
        raise ConfigurationError(f"--count must be at least 1 (got {count})")
    if digits < 15:
        raise ConfigurationError(f"--digits must be at least 15 (got {digits})")

    velocities = NullconeService.singular_velocities(count, digits)
    ExportService.write_eigenvalues(velocities, digits, deps.output_path(args, config))
    return 0


def cmd_nroots(args: argparse.Namespace) -> int:
    """N(β) for every requested speed"""
    config = deps.load_run_config(args)
    digits = int(deps.option(args, config, "digits", settings.START_DIGITS))
    raw = args.betas or config.get("betas") or []
    if not raw:
        raise ConfigurationError("nroots needs at least one beta")

    betas = [deps.parse_decimal(b, "beta", digits) for b in raw]
    rows = NullconeService.staircase(betas, digits)
    ExportService.write_staircase(rows, deps.output_path(args, config))
    return 0


def register(subparsers, common: argparse.ArgumentParser):
    singular = subparsers.add_parser(
        "singular", parents=[common], help="singular velocities beta_k (eigenvalue table)"
    )
    singular.add_argument("--count", type=int, help="number of eigenvalues (default 15)")
    singular.set_defaults(func=cmd_singular)

    nroots = subparsers.add_parser(
        "nroots", parents=[common], help="number of null-cone roots N(beta)"
    )
    nroots.add_argument("betas", nargs="*", help="speeds as decimal strings")
    nroots.set_defaults(func=cmd_nroots)
