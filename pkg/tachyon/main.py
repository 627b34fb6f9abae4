"""
tachyon-selfforce command-line entry point

Builds the parser from the subcommand modules, installs logging and turns
every package error into its exit code.
"""
import sys
from typing import List, Optional

from pydantic import ValidationError

from tachyon import __version__
from tachyon.cli import deps
from tachyon.cli.commands import scan, singular, tunnel, verify
from tachyon.core.config import print_config_summary
from tachyon.core.exceptions import EXIT_OK, EXIT_USAGE, TachyonError
from tachyon.core.logging import get_logger, setup_logging

logger = get_logger("tachyon.main")

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


# ============================================
# PARSER
# ============================================

def build_parser() -> deps.CliParser:
    parser = deps.CliParser(
        prog="tachyon",
        description="Self-force of a charged tachyon in circular orbit, and tachyon tunneling",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")

    common = deps.common_parser()
    singular.register(subparsers, common)
    scan.register(subparsers, common)
    tunnel.register(subparsers, common)
    verify.register(subparsers, common)
    return parser


# ============================================
# GLOBAL ERROR HANDLING
# ============================================

def _report(message: str):
    print(f"error: {message}", file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except TachyonError as exc:
        _report(str(exc))
        return exc.exit_code

    if args.log_level and args.log_level.upper() not in LOG_LEVELS:
        _report(f"--log-level must be one of {', '.join(LOG_LEVELS)}")
        return EXIT_USAGE
    setup_logging(args.log_level, quiet=args.quiet)
    if args.log_level and args.log_level.upper() == "DEBUG":
        print_config_summary()

    try:
        return args.func(args) or EXIT_OK
    except TachyonError as exc:
        logger.error(f"{type(exc).__name__}: {exc}", extra={"detail": exc.detail})
        _report(str(exc))
        return exc.exit_code
    except ValidationError as exc:
        errors = [
            f"{'.'.join(str(x) for x in error['loc'])}: {error['msg']}"
            for error in exc.errors()
        ]
        logger.error(f"Validation error: {errors}")
        _report("; ".join(errors))
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.warning("Interrupted")
        return 130


def run():
    sys.exit(main())


if __name__ == "__main__":
    run()
