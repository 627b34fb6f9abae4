"""
`zscan`, `zoom` and `epsilon`: β sweeps written as scan files
"""
import argparse
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from tachyon.cli import deps
from tachyon.core.config import settings
from tachyon.core.exceptions import ConfigurationError
from tachyon.core.logging import get_logger
from tachyon.schemas.physics_schemas import ForceMode, ForceSample
from tachyon.schemas.scan_schemas import Census, ScanConfig, ScanResult
from tachyon.services.export_service import ExportService
from tachyon.services.scan_service import ScanService

logger = get_logger(__name__)

DEFAULT_RANGES = {
    "zscan": ("1.5", "21", 400, ForceMode.FEYNMAN_WHEELER),
    "epsilon": ("4.7", "16", 200, ForceMode.RETARDED),
}


def _mode(value: Any) -> ForceMode:
    try:
        return ForceMode(value)
    except ValueError:
        raise ConfigurationError(f"Unknown force mode {value!r}")


def _summary(lines: List[str], output: Optional[str]):
    """Census on stdout; commented out when the data itself went to stdout"""
    prefix = "# " if deps.writes_stdout(output) else ""
    for line in lines:
        print(prefix + line, file=sys.stdout)


def _census_line(census: Census) -> str:
    return (
        f"census: positive={census.n_positive} negative={census.n_negative} "
        f"alternations={census.n_alternations} unconverged={census.n_unconverged}"
    )


def _resumed(args: argparse.Namespace, config: ScanConfig, output: Optional[str]) -> Optional[List[ForceSample]]:
    """Samples already present in the output file of an interrupted identical run"""
    if not args.resume or deps.writes_stdout(output) or not Path(output).exists():
        return None
    header, samples = ExportService.read_scan(output)
    expected = {
        "mode": config.mode.value,
        "beta_min": config.beta_min.serialize(),
        "beta_max": config.beta_max.serialize(),
        "samples": str(config.samples),
    }
    mismatched = [key for key, value in expected.items() if header.get(key) != value]
    if mismatched:
        raise ConfigurationError(
            f"Cannot resume from {output}: {', '.join(mismatched)} differ from this run"
        )
    logger.info(f"Resuming from {output} with {len(samples)} completed samples")
    return samples


def _finish(result: ScanResult, output: Optional[str]) -> Census:
    ExportService.write_scan(result, output)
    return ScanService.sign_census(result)


# ============================================
# ZSCAN / EPSILON
# ============================================

def cmd_sweep(args: argparse.Namespace) -> int:
    """Coarse scan with exclusion windows around the singular velocities"""
    config = deps.load_run_config(args)
    beta_min, beta_max, samples, mode = DEFAULT_RANGES[args.command]
    policy = deps.build_policy(args, config)
    digits = policy.start_digits

    scan_config = ScanConfig(
        beta_min=deps.parse_decimal(deps.option(args, config, "beta_min", beta_min), "beta_min", digits),
        beta_max=deps.parse_decimal(deps.option(args, config, "beta_max", beta_max), "beta_max", digits),
        samples=int(deps.option(args, config, "samples", samples)),
        mode=_mode(deps.option(args, config, "mode", mode.value)),
        policy=policy,
        exclusion_radius=deps.parse_decimal(
            deps.option(args, config, "exclusion_radius", settings.EXCLUSION_RADIUS), "exclusion_radius", 15
        ),
    )
    output = deps.output_path(args, config)
    result = ScanService.sweep(
        scan_config,
        workers=deps.workers(args, config),
        completed=_resumed(args, scan_config, output),
        timestamp=args.timestamp,
    )
    census = _finish(result, output)

    lines = [f"samples: {len(result.samples)}", _census_line(census)]
    if scan_config.mode is ForceMode.RETARDED:
        lines.extend(_epsilon_lines(result))
    _summary(lines, output)
    return 0


def _epsilon_lines(result: ScanResult) -> List[str]:
    values = np.array([float(s.epsilon.value) for s in result.samples if s.converged])
    if values.size == 0:
        return ["epsilon: no converged samples"]
    return [
        f"epsilon: positive={int((values > 0).sum())}/{values.size} "
        f"min={values.min():.6e} median={float(np.median(values)):.6e} max={values.max():.6e}"
    ]


# ============================================
# ZOOM
# ============================================

def cmd_zoom(args: argparse.Namespace) -> int:
    """Dense window without exclusions; with --levels > 1 prints the refinement census"""
    config = deps.load_run_config(args)
    policy = deps.build_policy(args, config)

    center_value = deps.option(args, config, "center")
    if center_value is None:
        raise ConfigurationError("zoom needs --center")
    # decimal text is parsed by zoom_config at the precision the window needs
    center = deps.decimal_text(center_value, "center")
    width = deps.decimal_text(deps.option(args, config, "width", "1e-3"), "width")
    samples = int(deps.option(args, config, "samples", 1000))
    mode = _mode(deps.option(args, config, "mode", ForceMode.FEYNMAN_WHEELER.value))
    levels = int(deps.option(args, config, "levels", 1))
    output = deps.output_path(args, config)
    n_workers = deps.workers(args, config)
    if levels < 1:
        raise ConfigurationError(f"--levels must be at least 1 (got {levels})")

    if levels > 1:
        report = ScanService.refine_census(center, width, samples, policy, levels, mode, n_workers)
        lines = [f"level {entry.level} ({entry.samples} samples) {_census_line(entry.census)}" for entry in report]
        lines.append(f"alternations non-decreasing: {'yes' if ScanService.alternations_grow(report) else 'no'}")
        print("\n".join(lines), file=sys.stdout)
        return 0

    scan_config = ScanService.zoom_config(center, width, samples, policy, mode)
    result = ScanService.sweep(
        scan_config,
        workers=n_workers,
        completed=_resumed(args, scan_config, output),
        kind="zoom",
        timestamp=args.timestamp,
    )
    census = _finish(result, output)
    _summary([f"samples: {len(result.samples)}", _census_line(census)], output)
    return 0


def _scan_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--mode", choices=[m.value for m in ForceMode], help="force mode")
    parser.add_argument("--samples", type=int, help="grid points")
    parser.add_argument("--resume", action="store_true", help="skip samples already in the output file")


def register(subparsers, common: argparse.ArgumentParser):
    for name, help_text in (
        ("zscan", "coarse scan of Z(beta)"),
        ("epsilon", "scan of the azimuthal-to-radial ratio epsilon(beta)"),
    ):
        beta_min, beta_max, samples, mode = DEFAULT_RANGES[name]
        parser = subparsers.add_parser(name, parents=[common], help=help_text)
        parser.add_argument("--beta-min", dest="beta_min", help=f"lower end (default {beta_min})")
        parser.add_argument("--beta-max", dest="beta_max", help=f"upper end (default {beta_max})")
        parser.add_argument(
            "--exclusion-radius", dest="exclusion_radius", help="window skipped around each singular velocity"
        )
        _scan_flags(parser)
        parser.set_defaults(func=cmd_sweep)

    zoom = subparsers.add_parser("zoom", parents=[common], help="dense scan around a singular velocity")
    zoom.add_argument("--center", help="window centre, e.g. 4.603338848751701")
    zoom.add_argument("--width", help="window width (default 1e-3)")
    zoom.add_argument("--levels", type=int, help="census at samples*2^level for level < levels")
    _scan_flags(zoom)
    zoom.set_defaults(func=cmd_zoom)
