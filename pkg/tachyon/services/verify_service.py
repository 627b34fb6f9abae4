"""
Acceptance suite behind the `verify` subcommand

Each check is deterministic and reports pass/fail with a short detail
string; a check that raises counts as failed.
"""
import math
from typing import Callable, List, Optional, Sequence

import numpy as np
from mpmath import mp, mpf

from tachyon.core.exceptions import TachyonError
from tachyon.core.logging import get_logger
from tachyon.schemas.physics_schemas import Branch, ForceMode
from tachyon.schemas.tunnel_schemas import BarrierProfile, SegmentTag
from tachyon.schemas.verify_schemas import CheckResult, VerificationReport
from tachyon.services.field_service import TEST_POINT, FieldService
from tachyon.services.nullcone_service import NullconeService
from tachyon.services.selfforce_service import SelfForceService
from tachyon.services.tunnel_service import TunnelService

logger = get_logger(__name__)

# published singular speeds, ascending
SINGULAR_BETA_REFERENCE = (
    "4.603338848751701", "7.789705767492714", "10.94987986982622",
    "14.10169533046915", "17.24976556755881", "20.39583252184294",
    "23.54070189773618", "26.68479810180271", "29.82836607105987",
    "32.97155711433862", "36.11446976533017", "39.25717095448966",
    "42.39970774262564", "45.54211418676631", "48.68441554248154",
)

# the printed table is good to about 2e-13 relative
TABLE_TOLERANCE = "1e-12"
TABLE_DIGITS = 30

STAIRCASE_POINTS = (("2", 1), ("5", 3), ("8", 5), ("12", 7))
RADIALITY_BETAS = ("1.5", "2", "3", "5", "8", "12")
ORACLE_BETAS = ("1.5", "1.8", "2", "2.5", "3", "3.5", "4", "5", "5.5", "6")
VERIFY_DIGITS = 50

TUNNEL_BARRIER = BarrierProfile(u_max=3.0, x_rise=2.0, x_plateau_start=3.0, x_plateau_end=5.0, x_fall=6.0)


def _check(name: str, fn: Callable[[], str]) -> CheckResult:
    try:
        detail = fn()
        return CheckResult(name=name, passed=True, detail=detail)
    except AssertionError as exc:
        return CheckResult(name=name, passed=False, detail=str(exc))
    except (TachyonError, ArithmeticError, ValueError) as exc:
        return CheckResult(name=name, passed=False, detail=f"{type(exc).__name__}: {exc}")


class VerificationService:
    """Runs the acceptance checks and collects a report"""

    @staticmethod
    def table_reproduction(reference: Sequence[str] = SINGULAR_BETA_REFERENCE) -> str:
        """
        β_k against the published table at TABLE_TOLERANCE, and against the
        independent tan x = x route at 10^-(digits − 5).
        """
        velocities = NullconeService.singular_velocities(len(reference), TABLE_DIGITS)
        independent = NullconeService.singular_betas_from_tan(len(reference), TABLE_DIGITS)
        with mp.workdps(TABLE_DIGITS + 10):
            tolerance = mpf(TABLE_TOLERANCE)
            for velocity, other in zip(velocities, independent):
                error = abs(velocity.beta_k.value - other.value) / other.value
                assert error < mpf(10) ** -(TABLE_DIGITS - 5), (
                    f"beta_{velocity.index} disagrees with the tan x = x route by {mp.nstr(error, 3)}"
                )
            for velocity, expected in zip(velocities, reference):
                target = mpf(expected)
                error = abs(velocity.beta_k.value - target) / target
                assert error < tolerance, (
                    f"beta_{velocity.index} = {mp.nstr(velocity.beta_k.value, 17)}, expected {expected}"
                )
        return f"{len(reference)} singular speeds match"

    @staticmethod
    def staircase() -> str:
        for beta, expected in STAIRCASE_POINTS:
            count = NullconeService.count_roots(beta, VERIFY_DIGITS)
            assert count == expected, f"N({beta}) = {count}, expected {expected}"
        velocities = NullconeService.singular_velocities(15, VERIFY_DIGITS)
        with mp.workdps(VERIFY_DIGITS):
            for velocity in velocities:
                below = NullconeService.count_roots(velocity.beta_k.value - mpf("1e-3"), VERIFY_DIGITS)
                above = NullconeService.count_roots(velocity.beta_k.value + mpf("1e-3"), VERIFY_DIGITS)
                assert below == 2 * velocity.index - 1 and above == below + 2, (
                    f"N jumps {below} -> {above} across beta_{velocity.index}"
                )
        return "N = 1, 3, 5, 7 and jumps of 2 across the first 15 singular speeds"

    @staticmethod
    def tangency_k() -> str:
        worst = mpf(0)
        for velocity in NullconeService.singular_velocities(5, VERIFY_DIGITS):
            k = NullconeService.tangent_root(velocity).k_factor.value
            worst = max(worst, abs(k))
            assert abs(k) < mpf("1e-20"), f"|K| = {mp.nstr(abs(k), 5)} at beta_{velocity.index}"
        return f"max |K| = {mp.nstr(worst, 3)}"

    @staticmethod
    def fw_radiality() -> str:
        for beta in RADIALITY_BETAS:
            radial, azimuthal, _ = SelfForceService.total_force(beta, ForceMode.FEYNMAN_WHEELER, VERIFY_DIGITS)
            assert abs(azimuthal) < mpf("1e-20") * abs(radial), (
                f"azimuthal/radial = {mp.nstr(abs(azimuthal / radial), 5)} at beta={beta}"
            )
        return f"{len(RADIALITY_BETAS)} speeds radial to 1e-20"

    @staticmethod
    def mode_consistency() -> str:
        for beta in RADIALITY_BETAS:
            fw, _, _ = SelfForceService.total_force(beta, ForceMode.FEYNMAN_WHEELER, VERIFY_DIGITS)
            retarded, _, _ = SelfForceService.total_force(beta, ForceMode.RETARDED, VERIFY_DIGITS)
            with mp.workdps(VERIFY_DIGITS):
                assert abs(fw - retarded) <= mpf("1e-10") * abs(fw), (
                    f"radial force differs between modes at beta={beta}"
                )
        return "radial force identical in both modes"

    @staticmethod
    def field_oracle(h: str = "1e-4") -> str:
        """Observed convergence order of the finite-difference fields over 20 configurations"""
        orders: List[float] = []
        with mp.workdps(VERIFY_DIGITS):
            step = mpf(h)
            for beta in ORACLE_BETAS:
                root = NullconeService.find_roots(beta, VERIFY_DIGITS)[-1]
                for branch in (Branch.RETARDED, Branch.ADVANCED):
                    source = FieldService.source_kinematics(mpf(beta), root.model_copy(update={"branch": branch}))
                    exact = FieldService.lw_fields(source, TEST_POINT, branch, VERIFY_DIGITS).e_field
                    errors = []
                    for s in (step, step / 2):
                        approx = FieldService.potential_fields_oracle(
                            beta, TEST_POINT, branch, s, delay=root.tau, digits=VERIFY_DIGITS
                        ).e_field
                        errors.append(mp.sqrt(mp.fsum((a - e) ** 2 for a, e in zip(approx, exact))))
                    orders.append(float(mp.log(errors[0] / errors[1], 2)))
        bad = [o for o in orders if not 1.7 <= o <= 2.3]
        assert not bad, f"orders outside 2.0 +/- 0.3: {[round(o, 2) for o in bad]}"
        return f"{len(orders)} configurations, order {min(orders):.2f}..{max(orders):.2f}"

    @staticmethod
    def force_signs() -> str:
        for beta in ("2", "3", "6"):
            radial, _, _ = SelfForceService.total_force(beta, ForceMode.FEYNMAN_WHEELER, VERIFY_DIGITS)
            assert radial > 0, f"Z({beta}) is not negative"
        for beta in ("2", "5"):
            radial, azimuthal, _ = SelfForceService.total_force(beta, ForceMode.RETARDED, VERIFY_DIGITS)
            assert azimuthal / radial > 0, f"epsilon({beta}) is not positive"
        return "Z < 0 away from singular windows, epsilon > 0"

    @staticmethod
    def dual_implementation() -> str:
        for beta in ("2", "5", "8"):
            radial, _, _ = SelfForceService.total_force(beta, ForceMode.FEYNMAN_WHEELER, VERIFY_DIGITS)
            reference, _ = SelfForceService.reference_force(beta, VERIFY_DIGITS)
            with mp.workdps(VERIFY_DIGITS):
                assert abs(radial - reference.value) <= mpf("1e-30") * abs(radial), (
                    f"independent evaluators disagree at beta={beta}"
                )
        return "lobe-bracketed complex evaluator agrees"

    @staticmethod
    def tunnel_conservation() -> str:
        trajectory = TunnelService.integrate_1d(1.0, TUNNEL_BARRIER, 0.0, 8.0)
        segments = trajectory.segments
        assert segments == [
            SegmentTag.INCIDENT_FORWARD, SegmentTag.FORBIDDEN_BACKWARD, SegmentTag.TRANSMITTED_FORWARD
        ], f"segments {[s.value for s in segments]}"
        for previous, current in zip(trajectory.states, trajectory.states[1:]):
            backward = previous.segment is SegmentTag.FORBIDDEN_BACKWARD
            assert (current.coord_time < previous.coord_time) == backward, (
                f"time ordering broken at x={current.position[0]}"
            )
        energy = max(TunnelService.energy_residual(s, 1.0, TUNNEL_BARRIER) for s in trajectory.states)
        dispersion = max(TunnelService.dispersion_residual(s) for s in trajectory.states)
        assert energy < 1e-12 and dispersion < 1e-12, f"residuals {energy:.2e}, {dispersion:.2e}"
        return f"energy residual {energy:.1e}, dispersion residual {dispersion:.1e}"

    @staticmethod
    def reversibility() -> str:
        trajectory = TunnelService.integrate_2d(1.0, 0.5, TUNNEL_BARRIER, 0.0, 8.0)
        back = TunnelService.reverse(trajectory, TUNNEL_BARRIER)
        start, end = trajectory.states[0], back.states[-1]
        drift = max(
            abs(start.position[0] - end.position[0]),
            abs(start.position[1] - end.position[1]),
            abs(start.coord_time - end.coord_time),
        )
        assert drift < 1e-9, f"reversed run misses the start by {drift:.2e}"
        return f"start reproduced to {drift:.1e}"

    @staticmethod
    def classification_agreement(samples: int = 1000, seed: int = 0) -> str:
        rng = np.random.default_rng(seed)
        for _ in range(samples):
            e_total = float(rng.uniform(0.2, 4.0))
            barrier = BarrierProfile(
                u_max=float(rng.uniform(0.0, 6.0)),
                x_rise=1.0,
                x_plateau_start=float(1.0 + rng.uniform(0.2, 1.0)),
                x_plateau_end=3.0,
                x_fall=float(3.0 + rng.uniform(0.2, 1.0)),
            )
            p_limit = math.sqrt(e_total * e_total + 1.0)
            p_y = float(rng.uniform(-0.99, 0.99) * p_limit)
            if abs(abs(p_y) - 1.0) < 1e-9:
                continue
            predicted = TunnelService.classify_incidence(e_total, p_y, barrier).outcome
            integrated = TunnelService.integrate_2d(e_total, p_y, barrier, 0.0, 5.0, step=0.05).outcome
            assert predicted is integrated, (
                f"E={e_total}, p_y={p_y}, U_max={barrier.u_max}: {predicted.value} vs {integrated.value}"
            )
        return f"{samples} randomized configurations agree"

    @staticmethod
    def run(reference: Optional[Sequence[str]] = None, seed: int = 0) -> VerificationReport:
        """Every check in a fixed order; `seed` drives the randomized tunneling comparison"""
        table = reference or SINGULAR_BETA_REFERENCE
        checks = [
            ("table_reproduction", lambda: VerificationService.table_reproduction(table)),
            ("staircase", VerificationService.staircase),
            ("tangency_k", VerificationService.tangency_k),
            ("fw_radiality", VerificationService.fw_radiality),
            ("mode_consistency", VerificationService.mode_consistency),
            ("field_oracle", VerificationService.field_oracle),
            ("force_signs", VerificationService.force_signs),
            ("dual_implementation", VerificationService.dual_implementation),
            ("tunnel_conservation", VerificationService.tunnel_conservation),
            ("reversibility", VerificationService.reversibility),
            ("classification_agreement", lambda: VerificationService.classification_agreement(seed=seed)),
        ]
        results = []
        for name, fn in checks:
            logger.info(f"Running check {name}")
            results.append(_check(name, fn))
        report = VerificationReport(checks=results)
        if not report.passed:
            logger.error(f"Verification failed: {', '.join(report.failures)}")
        return report
