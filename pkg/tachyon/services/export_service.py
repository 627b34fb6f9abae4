"""
Result files

Every file is UTF-8 text: `#`-prefixed `key: value` header lines, a
`# columns:` line, then comma-separated rows. Nothing run-dependent is
written unless asked for, so identical configurations give identical bytes.
"""
import json
import os
import sys
from contextlib import contextmanager
from decimal import Decimal
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, TextIO, Tuple

from mpmath import mp

from tachyon import __version__
from tachyon.core.config import settings
from tachyon.core.exceptions import ConfigurationError, OutputError
from tachyon.core.logging import get_logger
from tachyon.core.numerics import BigReal, to_scientific
from tachyon.schemas.physics_schemas import ForceMode, ForceSample, SingularVelocity
from tachyon.schemas.scan_schemas import ScanResult
from tachyon.schemas.tunnel_schemas import Trajectory

logger = get_logger(__name__)

SCAN_COLUMNS = ("beta", "z_value", "epsilon", "n_roots", "converged", "digits_used")
TRAJECTORY_COLUMNS = ("x", "y", "t", "p_x", "p_y", "time_direction", "segment_tag")


@contextmanager
def _open_output(path: Optional[str]) -> Iterator[TextIO]:
    """
    Target file, or stdout for None / '-'.

    Rows go to a hidden sibling file that replaces the target only once the
    writer finishes, so an interrupted write never leaves a truncated file
    for --resume to pick up.
    """
    if path is None or path == "-":
        yield sys.stdout
        return
    target = Path(path)
    partial = target.with_name(f".{target.name}.{os.getpid()}.part")
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(partial, "w", encoding="utf-8", newline="\n") as handle:
            yield handle
        os.replace(partial, target)
    except OSError as exc:
        raise OutputError(f"Cannot write {path}: {exc.strerror or exc}", {"path": str(path)})
    finally:
        if partial.exists():
            partial.unlink()
    logger.info(f"Wrote {target}")


def _header(handle: TextIO, fields: Sequence[Tuple[str, Any]], columns: Sequence[str]):
    for key, value in fields:
        handle.write(f"# {key}: {value}\n")
    handle.write(f"# columns: {','.join(columns)}\n")


def _float(value: float) -> str:
    return repr(float(value))


class ExportService:
    """Writers and readers for eigenvalue, scan and trajectory files"""

    @staticmethod
    def write_eigenvalues(velocities: List[SingularVelocity], digits: int, path: Optional[str] = None):
        """One β_k per line in plain decimal notation"""
        with _open_output(path) as handle:
            for velocity in velocities:
                handle.write(mp.nstr(velocity.beta_k.value, digits, strip_zeros=False) + "\n")

    @staticmethod
    def write_staircase(rows: List[Tuple[BigReal, int]], path: Optional[str] = None):
        with _open_output(path) as handle:
            _header(handle, [("tool", settings.APP_NAME), ("version", __version__)], ("beta", "n_roots"))
            for beta, count in rows:
                handle.write(f"{beta.serialize()},{count}\n")

    # ============================================
    # SCANS
    # ============================================

    @staticmethod
    def scan_header(result: ScanResult) -> List[Tuple[str, Any]]:
        config = result.config
        policy = config.policy
        fields: List[Tuple[str, Any]] = [
            ("tool", settings.APP_NAME),
            ("version", result.metadata.tool_version),
            ("kind", result.metadata.kind),
            ("mode", config.mode.value),
            ("beta_min", config.beta_min.serialize()),
            ("beta_max", config.beta_max.serialize()),
            ("samples", config.samples),
            ("exclusion_radius", config.exclusion_radius.serialize()),
            ("start_digits", policy.start_digits),
            ("growth_factor", policy.growth_factor),
            ("agreement_tol", policy.agreement_tol),
            ("max_digits", policy.max_digits),
            ("eigenvalues", " ".join(to_scientific(b.value, 20) for b in result.metadata.eigenvalues)),
        ]
        if result.metadata.timestamp:
            fields.append(("timestamp", result.metadata.timestamp))
        return fields

    @staticmethod
    def write_scan(result: ScanResult, path: Optional[str] = None):
        """Header echoing the configuration, then one row per sample in β order"""
        with _open_output(path) as handle:
            _header(handle, ExportService.scan_header(result), SCAN_COLUMNS)
            for sample in result.samples:
                digits = sample.digits_used
                handle.write(",".join((
                    to_scientific(sample.beta.value, digits),
                    to_scientific(sample.z_value.value, digits),
                    to_scientific(sample.epsilon.value, digits),
                    str(sample.n_roots),
                    "1" if sample.converged else "0",
                    str(digits),
                )) + "\n")

    @staticmethod
    def read_header(path: str) -> Dict[str, str]:
        header: Dict[str, str] = {}
        for line in ExportService._lines(path):
            if not line.startswith("#"):
                break
            key, _, value = line[1:].partition(":")
            header[key.strip()] = value.strip()
        return header

    @staticmethod
    def read_scan(path: str) -> Tuple[Dict[str, str], List[ForceSample]]:
        """Header and samples of an existing scan file (for resuming)"""
        lines = ExportService._lines(path)
        header = ExportService.read_header(path)
        try:
            mode = ForceMode(header.get("mode", ForceMode.FEYNMAN_WHEELER.value))
        except ValueError:
            raise ConfigurationError(f"Unknown force mode in {path}: {header.get('mode')}")

        samples: List[ForceSample] = []
        for number, line in enumerate(lines, start=1):
            if not line or line.startswith("#"):
                continue
            try:
                beta, z_value, epsilon, n_roots, converged, digits = line.split(",")
                d = int(digits)
                z = BigReal.of(z_value, d)
                eps = BigReal.of(epsilon, d)
                radial = -z
                samples.append(ForceSample(
                    beta=BigReal.of(beta, d),
                    z_value=z,
                    epsilon=eps,
                    mode=mode,
                    n_roots=int(n_roots),
                    converged=converged == "1",
                    digits_used=d,
                    radial_force=radial,
                    azimuthal_force=eps * radial if mode is ForceMode.RETARDED else BigReal.of(0, d),
                ))
            except ValueError as exc:
                raise ConfigurationError(f"Malformed row {number} in {path}: {exc}")
        return header, samples

    # ============================================
    # TRAJECTORIES
    # ============================================

    @staticmethod
    def write_trajectory(
        trajectory: Trajectory,
        path: Optional[str] = None,
        extra: Sequence[Tuple[str, Any]] = (),
    ):
        fields: List[Tuple[str, Any]] = [
            ("tool", settings.APP_NAME),
            ("version", __version__),
            *extra,
            ("outcome", trajectory.outcome.value),
            ("e_total", _float(trajectory.e_total)),
            ("m0", _float(trajectory.m0)),
            ("turning_points", " ".join(_float(x) for x in trajectory.turning_points)),
        ]
        if trajectory.entry_time is not None:
            fields.append(("entry_time", _float(trajectory.entry_time)))
        if trajectory.exit_time is not None:
            fields.append(("exit_time", _float(trajectory.exit_time)))

        with _open_output(path) as handle:
            _header(handle, fields, TRAJECTORY_COLUMNS)
            for state in trajectory.states:
                handle.write(",".join((
                    _float(state.position[0]),
                    _float(state.position[1]),
                    _float(state.coord_time),
                    _float(state.momentum[0]),
                    _float(state.momentum[1]),
                    str(state.time_direction),
                    state.segment.value,
                )) + "\n")

    # ============================================
    # CONFIG FILES
    # ============================================

    @staticmethod
    def load_config(path: str) -> Dict[str, Any]:
        """Nested key/value parameters from a JSON file; decimals stay exact"""
        text = "\n".join(ExportService._lines(path))
        try:
            data = json.loads(text, parse_float=Decimal)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"Invalid config file {path}: {exc}")
        if not isinstance(data, dict):
            raise ConfigurationError(f"Config file {path} must hold a JSON object")
        return data

    @staticmethod
    def _lines(path: str) -> List[str]:
        try:
            return Path(path).read_text(encoding="utf-8").splitlines()
        except OSError as exc:
            raise OutputError(f"Cannot read {path}: {exc.strerror or exc}", {"path": str(path)})
