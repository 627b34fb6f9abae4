"""
CLI Dependencies
Shared flags, config-file merging and decimal parsing for every subcommand
"""
import argparse
from decimal import Decimal, InvalidOperation
from typing import Any, Dict, Optional

from tachyon.core.config import settings
from tachyon.core.exceptions import ConfigurationError
from tachyon.core.numerics import BigReal, PrecisionPolicy
from tachyon.services.export_service import ExportService

# top-level config keys shared by all subcommands
COMMON_KEYS = ("digits", "tol", "max_digits", "workers", "output", "seed")


class CliParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors become ConfigurationError (exit 1)"""

    def error(self, message: str):
        raise ConfigurationError(f"{self.prog}: {message}")


def common_parser() -> argparse.ArgumentParser:
    """Parent parser with the flags every subcommand accepts"""
    parser = argparse.ArgumentParser(add_help=False)
    group = parser.add_argument_group("common options")
    group.add_argument("--digits", type=int, help="working precision in decimal digits")
    group.add_argument("--tol", help="relative agreement tolerance of the precision ladder")
    group.add_argument("--max-digits", type=int, dest="max_digits", help="precision ceiling")
    group.add_argument("--workers", type=int, help="parallel evaluations (0 = all cores)")
    group.add_argument("--output", "-o", help="result file ('-' or omitted for stdout)")
    group.add_argument("--config", help="JSON file with run parameters")
    group.add_argument("--seed", type=int, help="seed for randomized sweeps")
    group.add_argument("--timestamp", action="store_true", help="record the run time in the header")
    group.add_argument("--log-level", dest="log_level", help="DEBUG, INFO, WARNING, ERROR")
    group.add_argument("--quiet", action="store_true", help="only warnings and errors on the console")
    return parser


def load_run_config(args: argparse.Namespace) -> Dict[str, Any]:
    """
    Parameters for this subcommand from --config.

    Top-level common keys apply to every subcommand; a section named after
    the subcommand overrides them. A file without that section is read as
    a flat parameter set for this subcommand.
    """
    if not getattr(args, "config", None):
        return {}
    data = ExportService.load_config(args.config)
    if args.command not in data:
        return dict(data)
    merged = {key: data[key] for key in COMMON_KEYS if key in data}
    section = data[args.command]
    if not isinstance(section, dict):
        raise ConfigurationError(f"Config section '{args.command}' must be an object")
    merged.update(section)
    return merged


def option(args: argparse.Namespace, config: Dict[str, Any], name: str, default: Any = None) -> Any:
    """Flag value, else config-file value, else `default` (settings or built-in)"""
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def decimal_text(value: Any, name: str) -> str:
    """Validate a decimal literal without a binary float round-trip"""
    text = str(value).strip()
    try:
        parsed = Decimal(text)
    except InvalidOperation:
        raise ConfigurationError(f"{name} must be a decimal number (got {text!r})")
    if not parsed.is_finite():
        raise ConfigurationError(f"{name} must be finite (got {text!r})")
    return text


def parse_decimal(value: Any, name: str, digits: int) -> BigReal:
    """Decimal flag or config value as a BigReal at `digits`"""
    text = decimal_text(value, name)
    significant = len(Decimal(text).as_tuple().digits)
    return BigReal.of(text, max(digits, significant + 5))


def build_policy(args: argparse.Namespace, config: Dict[str, Any]) -> PrecisionPolicy:
    """Precision ladder from flags > config > settings"""
    start = int(option(args, config, "digits", settings.START_DIGITS))
    max_digits = int(option(args, config, "max_digits", settings.MAX_DIGITS))
    tol = decimal_text(option(args, config, "tol", settings.AGREEMENT_TOL), "tol")
    try:
        return PrecisionPolicy(
            start_digits=start,
            growth_factor=settings.GROWTH_FACTOR,
            agreement_tol=Decimal(tol),
            max_digits=max(max_digits, start),
            near_zero_exponent=settings.NEAR_ZERO_EXPONENT,
        )
    except ValueError as exc:
        raise ConfigurationError(f"Invalid precision settings: {exc}")


def workers(args: argparse.Namespace, config: Dict[str, Any]) -> Optional[int]:
    count = option(args, config, "workers")
    if count is None:
        return None
    if int(count) < 0:
        raise ConfigurationError(f"--workers must be non-negative (got {count})")
    return int(count)


def output_path(args: argparse.Namespace, config: Dict[str, Any]) -> Optional[str]:
    return option(args, config, "output")


def writes_stdout(path: Optional[str]) -> bool:
    return path is None or path == "-"
