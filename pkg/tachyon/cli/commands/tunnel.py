"""
`tunnel`: one trajectory through a trapezoidal barrier, or angle statistics
"""
import argparse
import sys

from tachyon.cli import deps
from tachyon.core.config import settings
from tachyon.core.exceptions import ConfigurationError
from tachyon.core.logging import get_logger
from tachyon.schemas.tunnel_schemas import Outcome, TunnelConfig
from tachyon.services.export_service import ExportService
from tachyon.services.tunnel_service import TunnelService

logger = get_logger(__name__)

OVERRIDES = ("e_total", "p_y", "m0", "x_start", "x_end", "step", "angles", "seed")


def build_tunnel_config(args: argparse.Namespace, data: dict) -> TunnelConfig:
    """Config file parameters with flag overrides"""
    data = dict(data)
    for key in OVERRIDES:
        value = getattr(args, key, None)
        if value is not None:
            data[key] = value
    if "step" not in data:
        data["step"] = settings.TUNNEL_STEP
    return TunnelConfig.model_validate(data)


def cmd_tunnel(args: argparse.Namespace) -> int:
    if not args.config:
        raise ConfigurationError("tunnel needs --config with the barrier and initial state")
    data = deps.load_run_config(args)
    config = build_tunnel_config(args, data)
    output = deps.output_path(args, data)

    if config.angles > 0:
        stats = TunnelService.incidence_statistics(
            config.e_total, config.barrier, config.angles, config.seed, config.m0
        )
        print(
            f"angles: {stats.samples} seed: {stats.seed} tunneled: {stats.n_tunneled} "
            f"reflected: {stats.n_reflected} transmission: {stats.transmission:.6f}",
            file=sys.stdout,
        )
        return 0

    if config.p_y == 0:
        trajectory = TunnelService.integrate_1d(
            config.e_total, config.barrier, config.x_start, config.x_end, config.step, config.m0
        )
    else:
        trajectory = TunnelService.integrate_2d(
            config.e_total, config.p_y, config.barrier, config.x_start, config.x_end, config.step, config.m0
        )

    barrier = config.barrier
    extra = [
        ("p_y", repr(config.p_y)),
        ("barrier", " ".join(repr(v) for v in (barrier.u_max, *barrier.kinks))),
        ("x_start", repr(config.x_start)),
        ("x_end", repr(config.x_end)),
        ("step", repr(config.step)),
    ]
    ExportService.write_trajectory(trajectory, output, extra)

    prefix = "# " if deps.writes_stdout(output) else ""
    lines = [f"outcome: {trajectory.outcome.value}"]
    if trajectory.outcome is Outcome.TUNNELED and trajectory.entry_time is not None:
        lines.append(f"entry_time: {trajectory.entry_time!r}")
        lines.append(f"exit_time: {trajectory.exit_time!r}")
    elif trajectory.outcome is Outcome.REFLECTED:
        lines.append(f"turning_x: {trajectory.turning_points[0]!r}")
    print("\n".join(prefix + line for line in lines), file=sys.stdout)
    return 0


def register(subparsers, common: argparse.ArgumentParser):
    parser = subparsers.add_parser("tunnel", parents=[common], help="tachyon trajectory through a barrier")
    parser.add_argument("--e-total", dest="e_total", type=float, help="total energy (m0 c^2 units)")
    parser.add_argument("--p-y", dest="p_y", type=float, help="transverse momentum (m0 c units)")
    parser.add_argument("--m0", type=float, help="rest-mass parameter")
    parser.add_argument("--x-start", dest="x_start", type=float)
    parser.add_argument("--x-end", dest="x_end", type=float)
    parser.add_argument("--step", type=float, help="x step before refinement")
    parser.add_argument("--angles", type=int, help="classify N random incidence angles instead")
    parser.set_defaults(func=cmd_tunnel)
