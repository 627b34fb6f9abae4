"""
`verify`: the acceptance suite
"""
import argparse
import sys

from tachyon.cli import deps
from tachyon.core.exceptions import VerificationFailed
from tachyon.services.verify_service import VerificationService


def cmd_verify(args: argparse.Namespace) -> int:
    config = deps.load_run_config(args)
    report = VerificationService.run(seed=int(deps.option(args, config, "seed", 0)))
    print(report.render(), file=sys.stdout)
    if not report.passed:
        raise VerificationFailed(report.failures)
    return 0


def register(subparsers, common: argparse.ArgumentParser):
    parser = subparsers.add_parser("verify", parents=[common], help="run the acceptance checks")
    parser.set_defaults(func=cmd_verify)
