"""
Tachyon trajectories through a potential barrier

Units m0 = c = 1 unless given. The march runs in x, not t: speed diverges
where the kinetic energy vanishes, while dt/dx = (E − U)/p_x stays finite
and simply changes sign, which is the backward-time splice through the
forbidden region. With y conserved momentum p_y,

    p_x² = (E − U(x))² + m0² − p_y²

and every barrier piece is linear, so each step's Δt and Δy come from the
closed-form antiderivatives of (E − U)/p_x and p_y/p_x.
"""
import math
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from tachyon.core.config import settings
from tachyon.core.exceptions import DomainError, IllPosedError, TurningPointError
from tachyon.core.logging import get_logger
from tachyon.schemas.tunnel_schemas import (
    BarrierProfile,
    IncidenceResult,
    IncidenceStatistics,
    Outcome,
    SegmentTag,
    Trajectory,
    TunnelState,
)

logger = get_logger(__name__)

# nodes at step/2, step/4, ... on each side of a turning point
REFINE_LEVELS = 10


def _log_sum(d: float, p: float, a2: float) -> float:
    """ln(d + √(d² + a²)) without cancellation for negative d"""
    if d >= 0:
        return math.log(d + p)
    return math.log(a2 / (p - d))


class _Motion:
    """Conserved quantities and the local momentum of one run"""

    def __init__(self, e_total: float, p_y: float, m0: float, barrier: BarrierProfile):
        self.e_total = e_total
        self.p_y = p_y
        self.m0 = m0
        self.barrier = barrier
        self.a2 = m0 * m0 - p_y * p_y

    def excess(self, x: float) -> float:
        """E − U(x): signed kinetic energy"""
        return self.e_total - self.barrier.potential(x)

    def px_squared(self, x: float) -> float:
        d = self.excess(x)
        return d * d + self.a2

    def px(self, x: float) -> float:
        return math.sqrt(max(self.px_squared(x), 0.0))

    def increments(self, x1: float, x2: float) -> Tuple[float, float]:
        """(Δt, Δy) from x1 to x2 > x1 inside one linear piece"""
        dx = x2 - x1
        d1, d2 = self.excess(x1), self.excess(x2)
        p1, p2 = self.px(x1), self.px(x2)
        # ∫ d/p dx = −(p2 − p1)/k, rewritten without the slope
        dt = dx * (d1 + d2) / (p1 + p2)
        if self.p_y == 0:
            return dt, 0.0
        k = self.barrier.slope(0.5 * (x1 + x2))
        if k == 0:
            return dt, self.p_y * dx / p1
        dy = -(self.p_y / k) * (_log_sum(d2, p2, self.a2) - _log_sum(d1, p1, self.a2))
        return dt, dy


class TunnelService:
    """Kinematic relations, trajectory integration and incidence classification"""

    # ============================================
    # KINEMATICS
    # ============================================

    @staticmethod
    def kinetic_energy(beta: float, m0: float = 1.0, c: float = 1.0) -> float:
        """E_k = m0 c² / √(β² − 1)"""
        beta = float(beta)
        if beta <= 1:
            raise DomainError(f"Tachyon kinetic energy requires beta > 1 (got {beta})")
        return m0 * c * c / math.sqrt(beta * beta - 1)

    @staticmethod
    def momentum_scalar(beta: float, m0: float = 1.0, c: float = 1.0) -> float:
        """p = m0 c β / √(β² − 1); tends to m0 c as β → ∞"""
        beta = float(beta)
        if beta <= 1:
            raise DomainError(f"Tachyon momentum requires beta > 1 (got {beta})")
        return m0 * c / math.sqrt(1 - 1 / (beta * beta))

    @staticmethod
    def speed_from_momentum(p: float, m0: float = 1.0, c: float = 1.0) -> float:
        """β = P/√(P² − 1) with P = p/(m0 c); no tachyonic speed for P ≤ 1"""
        ratio = float(p) / (m0 * c)
        if ratio <= 1:
            raise TurningPointError(
                f"Momentum {p} does not exceed m0*c = {m0 * c}",
                {"p": p, "m0c": m0 * c},
            )
        return ratio / math.sqrt(ratio * ratio - 1)

    # ============================================
    # INTEGRATION
    # ============================================

    @staticmethod
    def _check_incidence(motion: _Motion, x_start: float, x_end: float):
        if motion.e_total <= 0:
            raise IllPosedError(f"Total energy must be positive (got {motion.e_total})")
        if x_end <= x_start:
            raise IllPosedError("x_end must exceed x_start")
        if motion.excess(x_start) <= 0:
            raise IllPosedError(
                f"Start point x={x_start} lies where U >= E; no forward incident motion",
                {"x_start": x_start, "potential": motion.barrier.potential(x_start)},
            )
        if motion.px_squared(x_start) <= 0:
            raise IllPosedError(
                f"p_y={motion.p_y} leaves no real incident p_x at E={motion.e_total}",
                {"p_y": motion.p_y, "e_total": motion.e_total},
            )
        if motion.a2 == 0 and motion.barrier.u_max >= motion.e_total:
            raise IllPosedError("|p_y| = m0 c grazes the turning point with zero p_x")

    @staticmethod
    def _forbidden_bounds(motion: _Motion) -> Optional[Tuple[float, float]]:
        """Where E − U changes sign, or None when the barrier stays below E"""
        b = motion.barrier
        if b.u_max <= motion.e_total:
            return None
        fraction = motion.e_total / b.u_max
        enter = b.x_rise + fraction * (b.x_plateau_start - b.x_rise)
        leave = b.x_plateau_end + (1 - fraction) * (b.x_fall - b.x_plateau_end)
        return enter, leave

    @staticmethod
    def _nodes(x_start: float, x_end: float, step: float, specials: List[float]) -> List[float]:
        """Uniform grid plus kinks and turning points, refined around the latter"""
        count = max(int(math.ceil((x_end - x_start) / step)), 1)
        points = [float(p) for p in np.linspace(x_start, x_end, count + 1)]
        protected = {x_start, x_end}
        for x in specials:
            if not x_start <= x <= x_end:
                continue
            protected.add(x)
            points.append(x)
            for level in range(1, REFINE_LEVELS + 1):
                offset = step / 2 ** level
                points.extend(p for p in (x - offset, x + offset) if x_start < p < x_end)

        spacing = step / 2 ** (REFINE_LEVELS + 2)
        merged: List[float] = []
        for p in sorted(set(points)):
            if merged and p - merged[-1] <= spacing:
                if p in protected and merged[-1] not in protected:
                    merged[-1] = p
                elif p in protected:
                    merged.append(p)
                continue
            merged.append(p)
        return merged

    @staticmethod
    def _march(
        motion: _Motion,
        x_start: float,
        x_end: float,
        step: float,
        y_start: float = 0.0,
        t_start: float = 0.0,
    ) -> Trajectory:
        barrier = motion.barrier
        bounds = TunnelService._forbidden_bounds(motion)
        kinks = [x for x in barrier.kinks]
        specials = kinks + (list(bounds) if bounds else [])
        nodes = TunnelService._nodes(x_start, x_end, step, specials)

        # reflection: first node where p_x² is no longer positive
        turning_x: Optional[float] = None
        if motion.a2 < 0:
            for previous, node in zip(nodes, nodes[1:]):
                if motion.px_squared(node) <= 0:
                    turning_x = brentq(motion.px_squared, previous, node, xtol=1e-15, rtol=4 * np.finfo(float).eps)
                    break
            if turning_x is not None:
                nodes = TunnelService._nodes(
                    x_start, turning_x, step, [x for x in specials if x < turning_x] + [turning_x]
                )
                if nodes[-1] != turning_x:
                    nodes.append(turning_x)

        # forward leg
        xs = [nodes[0]]
        ts = [t_start]
        ys = [y_start]
        for x1, x2 in zip(nodes, nodes[1:]):
            dt, dy = motion.increments(x1, x2)
            xs.append(x2)
            ts.append(ts[-1] + dt)
            ys.append(ys[-1] + dy)

        states: List[TunnelState] = []
        phase = 0
        for x, t, y in zip(xs, ts, ys):
            if bounds and phase == 0 and x >= bounds[0]:
                phase = 1
            if bounds and phase == 1 and x >= bounds[1]:
                phase = 2
            if not bounds:
                tag = SegmentTag.INCIDENT_FORWARD
            else:
                tag = (SegmentTag.INCIDENT_FORWARD, SegmentTag.FORBIDDEN_BACKWARD, SegmentTag.TRANSMITTED_FORWARD)[phase]
            states.append(TunnelState(
                position=(x, y),
                momentum=(motion.px(x), motion.p_y),
                coord_time=t,
                time_direction=-1 if tag is SegmentTag.FORBIDDEN_BACKWARD else 1,
                segment=tag,
                kinetic_energy=abs(motion.excess(x)),
            ))

        entry_time = exit_time = None
        if turning_x is not None:
            # mirror image of the incoming leg, continuing forward in time
            t_turn, y_turn = ts[-1], ys[-1]
            for x, t, y in zip(reversed(xs[:-1]), reversed(ts[:-1]), reversed(ys[:-1])):
                states.append(TunnelState(
                    position=(x, 2 * y_turn - y),
                    momentum=(-motion.px(x), motion.p_y),
                    coord_time=2 * t_turn - t,
                    time_direction=1,
                    segment=SegmentTag.REFLECTED,
                    kinetic_energy=abs(motion.excess(x)),
                ))
            outcome = Outcome.REFLECTED
            turning_points = [turning_x]
        else:
            outcome = Outcome.TUNNELED
            times: Dict[float, float] = dict(zip(xs, ts))
            if bounds:
                turning_points = list(bounds)
                entry_time, exit_time = times.get(bounds[0]), times.get(bounds[1])
            else:
                turning_points = []
                entry_time, exit_time = times.get(barrier.x_rise), times.get(barrier.x_fall)

        trajectory = Trajectory(
            states=states,
            outcome=outcome,
            e_total=motion.e_total,
            m0=motion.m0,
            turning_points=turning_points,
            entry_time=entry_time,
            exit_time=exit_time,
        )
        TunnelService._check_residuals(trajectory, barrier)
        logger.info(
            f"Trajectory {outcome.value}: {len(states)} states, segments "
            f"{[tag.value for tag in trajectory.segments]}"
        )
        return trajectory

    @staticmethod
    def energy_residual(state: TunnelState, e_total: float, barrier: BarrierProfile) -> float:
        """|sign·E_k + U − E| for one state"""
        return abs(state.time_direction * state.kinetic_energy + barrier.potential(state.position[0]) - e_total)

    @staticmethod
    def dispersion_residual(state: TunnelState, m0: float = 1.0) -> float:
        """|p² − E_k² − m0²| for one state"""
        p_squared = state.momentum[0] ** 2 + state.momentum[1] ** 2
        return abs(p_squared - state.kinetic_energy ** 2 - m0 * m0)

    @staticmethod
    def _check_residuals(trajectory: Trajectory, barrier: BarrierProfile):
        tolerance = settings.TUNNEL_RESIDUAL_TOL
        scale = max(1.0, trajectory.e_total, barrier.u_max) ** 2
        worst = max(
            max(
                TunnelService.energy_residual(s, trajectory.e_total, barrier),
                TunnelService.dispersion_residual(s, trajectory.m0),
            )
            for s in trajectory.states
        )
        if worst > tolerance * scale:
            logger.warning(f"Conservation residual {worst:.3e} exceeds {tolerance:.1e}")

    @staticmethod
    def integrate_1d(
        e_total: float,
        barrier: BarrierProfile,
        x_start: float,
        x_end: float,
        step: Optional[float] = None,
        m0: float = 1.0,
    ) -> Trajectory:
        """Normal incidence; always tunnels when the plateau is finite"""
        motion = _Motion(e_total, 0.0, m0, barrier)
        TunnelService._check_incidence(motion, x_start, x_end)
        return TunnelService._march(motion, x_start, x_end, step or settings.TUNNEL_STEP)

    @staticmethod
    def integrate_2d(
        e_total: float,
        p_y: float,
        barrier: BarrierProfile,
        x_start: float,
        x_end: float,
        step: Optional[float] = None,
        m0: float = 1.0,
        y_start: float = 0.0,
    ) -> Trajectory:
        """Oblique incidence; reflects where E − U = √(p_y² − m0²) if that is reached"""
        motion = _Motion(e_total, p_y, m0, barrier)
        TunnelService._check_incidence(motion, x_start, x_end)
        return TunnelService._march(motion, x_start, x_end, step or settings.TUNNEL_STEP, y_start=y_start)

    @staticmethod
    def classify_incidence(e_total: float, p_y: float, barrier: BarrierProfile, m0: float = 1.0) -> IncidenceResult:
        """Closed-form outcome for a start point outside the barrier"""
        if e_total <= 0:
            raise IllPosedError(f"Total energy must be positive (got {e_total})")
        if e_total * e_total + m0 * m0 - p_y * p_y <= 0:
            raise IllPosedError(
                f"p_y={p_y} leaves no real incident p_x at E={e_total}",
                {"p_y": p_y, "e_total": e_total},
            )
        if abs(p_y) <= m0:
            return IncidenceResult(outcome=Outcome.TUNNELED)

        threshold = e_total - math.sqrt(p_y * p_y - m0 * m0)
        if barrier.u_max < threshold:
            return IncidenceResult(outcome=Outcome.TUNNELED)
        turning_x = barrier.x_rise + threshold / barrier.rise_slope
        return IncidenceResult(outcome=Outcome.REFLECTED, turning_x=turning_x)

    @staticmethod
    def incidence_statistics(
        e_total: float,
        barrier: BarrierProfile,
        samples: int,
        seed: int = 0,
        m0: float = 1.0,
    ) -> IncidenceStatistics:
        """Transmission over incidence angles drawn uniformly from (−π/2, π/2)"""
        if samples < 1:
            raise DomainError(f"samples must be at least 1 (got {samples})")
        rng = np.random.default_rng(seed)
        angles = rng.uniform(-np.pi / 2, np.pi / 2, size=samples)
        momentum = math.sqrt(e_total * e_total + m0 * m0)
        outcomes = [
            TunnelService.classify_incidence(e_total, float(momentum * np.sin(a)), barrier, m0).outcome
            for a in angles
        ]
        tunneled = sum(1 for o in outcomes if o is Outcome.TUNNELED)
        logger.info(f"Incidence statistics: {tunneled}/{samples} tunneled (seed {seed})")
        return IncidenceStatistics(
            samples=samples,
            seed=seed,
            n_tunneled=tunneled,
            n_reflected=samples - tunneled,
        )

    @staticmethod
    def reverse(trajectory: Trajectory, barrier: BarrierProfile, step: Optional[float] = None) -> Trajectory:
        """
        Re-integrate a tunneled trajectory from its transmitted end back to
        its start, with time running backward. The last state of the result
        should reproduce the first state of the input.
        """
        if trajectory.outcome is not Outcome.TUNNELED:
            raise DomainError("Only tunneled trajectories can be reversed")
        first, last = trajectory.states[0], trajectory.states[-1]
        p_y = last.momentum[1]
        motion = _Motion(trajectory.e_total, p_y, trajectory.m0, barrier.mirrored())
        x_start, x_end = -last.position[0], -first.position[0]
        mirrored = TunnelService._march(motion, x_start, x_end, step or settings.TUNNEL_STEP)

        t_end, y_end = last.coord_time, last.position[1]
        states = [
            s.model_copy(update={
                "position": (-s.position[0], y_end - s.position[1]),
                "coord_time": t_end - s.coord_time,
            })
            for s in mirrored.states
        ]
        return mirrored.model_copy(update={
            "states": states,
            "turning_points": sorted(-x for x in mirrored.turning_points),
            "entry_time": None,
            "exit_time": None,
        })
