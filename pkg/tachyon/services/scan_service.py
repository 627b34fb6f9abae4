"""
Parameter sweeps over β

Coarse scans skip a window around every singular velocity; zooms sample a
narrow window densely and keep unconverged samples flagged. Samples are
independent and evaluated through the worker pool; results are always
reassembled in β order.
"""
import math
from datetime import datetime, timezone
from typing import Dict, List, Optional, Tuple

from mpmath import mp

from tachyon.core.exceptions import DomainError
from tachyon.core.logging import get_logger
from tachyon.core.numerics import BigReal, Number, PrecisionPolicy, to_mpf, to_scientific
from tachyon.core.workers import parallel_map
from tachyon.schemas.physics_schemas import ForceMode, ForceSample
from tachyon.schemas.scan_schemas import Census, CensusLevel, ScanConfig, ScanMetadata, ScanResult
from tachyon.services.nullcone_service import NullconeService
from tachyon.services.selfforce_service import SelfForceService

logger = get_logger(__name__)

# digits beyond those needed to resolve the grid spacing
GRID_GUARD_DIGITS = 30


def _evaluate_sample(task: Tuple[BigReal, ForceMode, PrecisionPolicy]) -> ForceSample:
    beta, mode, policy = task
    return SelfForceService.self_force(beta, mode, policy)


def _grid_digits(config: ScanConfig) -> int:
    """Precision that keeps neighbouring grid points distinct"""
    with mp.workdps(max(config.beta_min.digits, config.beta_max.digits) + 10):
        span = config.beta_max.value - config.beta_min.value
        ratio = abs(config.beta_max.value) * config.samples / span
        needed = int(math.ceil(float(mp.log10(ratio)))) + GRID_GUARD_DIGITS
    return max(config.policy.start_digits, needed)


def _grid_key(beta: BigReal, digits: int) -> str:
    return to_scientific(beta.value, digits - 5)


class ScanService:
    """Sweeps, zooms and the sign census of Z"""

    @staticmethod
    def grid(config: ScanConfig) -> Tuple[List[BigReal], List[BigReal]]:
        """(grid points outside the exclusion windows, eigenvalues inside the range)"""
        digits = _grid_digits(config)
        with mp.workdps(digits + 10):
            lo, hi = config.beta_min.value, config.beta_max.value
            radius = config.exclusion_radius.value
            k_max = int(float(hi + radius) / math.pi) + 2
            velocities = NullconeService.singular_velocities(k_max, digits)
            eigenvalues = [v.beta_k for v in velocities if lo <= v.beta_k.value <= hi]
            nearby = [v.beta_k.value for v in velocities if lo - radius <= v.beta_k.value <= hi + radius]

            points: List[BigReal] = []
            step = (hi - lo) / (config.samples - 1)
            for i in range(config.samples):
                beta = hi if i == config.samples - 1 else lo + i * step
                if any(abs(beta - b_k) < radius for b_k in nearby):
                    continue
                points.append(BigReal.of(beta, digits))
        return points, eigenvalues

    @staticmethod
    def sweep(
        config: ScanConfig,
        workers: Optional[int] = None,
        completed: Optional[List[ForceSample]] = None,
        kind: str = "sweep",
        timestamp: bool = False,
    ) -> ScanResult:
        """
        Evaluate every grid point under the precision policy.

        `completed` holds samples from an interrupted run; grid points they
        cover are not recomputed.
        """
        points, eigenvalues = ScanService.grid(config)
        digits = _grid_digits(config)
        policy = config.policy.with_start(digits) if digits > config.policy.start_digits else config.policy

        done: Dict[str, ForceSample] = {}
        for sample in completed or []:
            if sample.mode is config.mode:
                done[_grid_key(sample.beta, digits)] = sample

        pending = [p for p in points if _grid_key(p, digits) not in done]
        logger.info(
            f"{kind}: {len(points)} grid points in [{mp.nstr(config.beta_min.value, 15)}, "
            f"{mp.nstr(config.beta_max.value, 15)}], {len(points) - len(pending)} already done, "
            f"mode {config.mode.value}"
        )

        fresh = parallel_map(_evaluate_sample, [(p, config.mode, policy) for p in pending], workers)
        for point, sample in zip(pending, fresh):
            done[_grid_key(point, digits)] = sample

        samples = [done[_grid_key(p, digits)] for p in points]
        unconverged = sum(1 for s in samples if not s.converged)
        if unconverged:
            logger.warning(f"{kind}: {unconverged} of {len(samples)} samples did not converge")

        metadata = ScanMetadata(
            kind=kind,
            timestamp=datetime.now(timezone.utc).isoformat(timespec="seconds") if timestamp else None,
            eigenvalues=eigenvalues,
        )
        return ScanResult(config=config, samples=samples, metadata=metadata)

    @staticmethod
    def zoom_config(
        center: Number,
        width: Number,
        samples: int,
        policy: Optional[PrecisionPolicy] = None,
        mode: ForceMode = ForceMode.FEYNMAN_WHEELER,
    ) -> ScanConfig:
        """
        Window [center − width/2, center + width/2] with no exclusions.

        The working precision grows with log10(|center|·samples/width) so
        windows far narrower than the start rung (width 1e-300 and below)
        keep distinct grid points. Text inputs are parsed at that precision.
        """
        policy = policy or PrecisionPolicy()
        digits = max(
            [x.digits for x in (center, width) if isinstance(x, BigReal)] + [policy.start_digits]
        )
        with mp.workdps(digits + 10):
            c, w = to_mpf(center), to_mpf(width)
            if w <= 0:
                raise DomainError(f"Zoom width must be positive (got {mp.nstr(w, 10)})")
            ratio = abs(c) * samples / w
            if ratio > 1:
                digits = max(digits, int(math.ceil(float(mp.log10(ratio)))) + GRID_GUARD_DIGITS)

        with mp.workdps(digits + 10):
            c, w = to_mpf(center), to_mpf(width)
            return ScanConfig(
                beta_min=BigReal.of(c - w / 2, digits),
                beta_max=BigReal.of(c + w / 2, digits),
                samples=samples,
                mode=mode,
                policy=policy,
                exclusion_radius=BigReal.of(0, 15),
            )

    @staticmethod
    def zoom(
        center: Number,
        width: Number,
        samples: int,
        policy: Optional[PrecisionPolicy] = None,
        mode: ForceMode = ForceMode.FEYNMAN_WHEELER,
        workers: Optional[int] = None,
        completed: Optional[List[ForceSample]] = None,
        timestamp: bool = False,
    ) -> ScanResult:
        """Dense scan of a narrow window, typically centred on a singular velocity"""
        config = ScanService.zoom_config(center, width, samples, policy, mode)
        return ScanService.sweep(config, workers, completed, kind="zoom", timestamp=timestamp)

    @staticmethod
    def sign_census(result: ScanResult) -> Census:
        """Counts over converged samples; alternations between adjacent converged samples"""
        positive = negative = alternations = unconverged = 0
        previous_sign = 0
        for sample in result.samples:
            if not sample.converged:
                unconverged += 1
                continue
            value = sample.z_value.value
            sign = 1 if value > 0 else -1 if value < 0 else 0
            if sign > 0:
                positive += 1
            elif sign < 0:
                negative += 1
            if sign and previous_sign and sign != previous_sign:
                alternations += 1
            if sign:
                previous_sign = sign
        return Census(
            n_positive=positive,
            n_negative=negative,
            n_alternations=alternations,
            n_unconverged=unconverged,
        )

    @staticmethod
    def refine_census(
        center: Number,
        width: Number,
        samples: int,
        policy: Optional[PrecisionPolicy] = None,
        levels: int = 1,
        mode: ForceMode = ForceMode.FEYNMAN_WHEELER,
        workers: Optional[int] = None,
    ) -> List[CensusLevel]:
        """Census of the same window at samples·2^level points, level = 0 .. levels − 1"""
        if levels < 1:
            raise DomainError(f"levels must be at least 1 (got {levels})")

        report: List[CensusLevel] = []
        for level in range(levels):
            density = samples * 2 ** level
            result = ScanService.zoom(center, width, density, policy, mode, workers)
            census = ScanService.sign_census(result)
            logger.info(f"Level {level}: {density} samples, {census.n_alternations} alternations")
            report.append(CensusLevel(level=level, samples=density, census=census))
        return report

    @staticmethod
    def alternations_grow(report: List[CensusLevel]) -> bool:
        """True when the alternation count never decreases with density"""
        counts = [entry.census.n_alternations for entry in report]
        return all(a <= b for a, b in zip(counts, counts[1:]))
