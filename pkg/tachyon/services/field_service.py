"""
Point-charge fields of the orbiting charge

Retarded and advanced Liénard-Wiechert fields in normalized units
(r = c = q = 1). The superluminal factor (1 − β²) is negative and K keeps
its sign; nothing is regularized except the present-location point.
"""
from typing import Optional, Sequence

from mpmath import mp, mpf

from tachyon.core.config import settings
from tachyon.core.exceptions import CerenkovSingularityError, DomainError, OracleInvalidError
from tachyon.core.logging import get_logger
from tachyon.core.numerics import (
    BigReal,
    Number,
    Vec3,
    add,
    cross,
    digits_of,
    dot,
    norm,
    scale,
    sub,
    to_mpf,
    vec,
)
from tachyon.schemas.physics_schemas import NORMALIZED_UNITS, Branch, FieldPair, Kinematics, NullRoot

logger = get_logger(__name__)

# phase 0 of the unit circle
TEST_POINT = (NORMALIZED_UNITS.r, 0, 0)


def _orbit_state(beta: mpf, t: mpf):
    """Position, velocity and acceleration at coordinate time t (ω = β)"""
    c, s = mp.cos(beta * t), mp.sin(beta * t)
    return (
        (c, s, mpf(0)),
        (-beta * s, beta * c, mpf(0)),
        (-beta * beta * c, -beta * beta * s, mpf(0)),
    )


class FieldService:
    """Kinematics, K factor and the fields of a single source point"""

    @staticmethod
    def kinematics_at(beta: Number, phase: Number) -> Kinematics:
        """Circular-orbit state at angle ωt = phase"""
        with mp.workdps(digits_of(beta, phase)):
            b, theta = to_mpf(beta), to_mpf(phase)
            if b < 0:
                raise DomainError(f"beta must be non-negative (got {mp.nstr(b, 20)})")
            c, s = mp.cos(theta), mp.sin(theta)
            return Kinematics(
                beta=b,
                phase=theta,
                position=(c, s, mpf(0)),
                beta_vec=(-b * s, b * c, mpf(0)),
                beta_dot=(-b * b * c, -b * b * s, mpf(0)),
            )

    @staticmethod
    def source_kinematics(beta: Number, root: NullRoot) -> Kinematics:
        """Source state for a null root: phase −φ when retarded, +φ when advanced"""
        with mp.workdps(digits_of(beta, root.phi)):
            phase = -to_mpf(root.phi) if root.branch is Branch.RETARDED else to_mpf(root.phi)
            return FieldService.kinematics_at(beta, phase)

    @staticmethod
    def k_factor(n_hat: Sequence, beta_vec: Sequence, branch: Branch, digits: Optional[int] = None) -> BigReal:
        """1 − n̂·β (retarded) or 1 + n̂·β (advanced)"""
        digits = digits or mp.dps
        with mp.workdps(max(digits, mp.dps)):
            value = 1 - branch.sign * dot([to_mpf(x) for x in n_hat], [to_mpf(x) for x in beta_vec])
        return BigReal.of(value, digits)

    @staticmethod
    def lw_fields(
        source: Kinematics,
        test_point: Sequence = TEST_POINT,
        branch: Branch = Branch.RETARDED,
        digits: Optional[int] = None,
    ) -> FieldPair:
        """
        Velocity plus acceleration field of one source point.

        E = (n̂ ∓ β)(1 − β²)/(K³R²) + n̂ × ((n̂ ∓ β) × β̇)/(K³R), upper sign
        retarded; B = ±n̂ × E. K keeps its sign, so the two roots of a merging
        pair contribute with opposite sign. |K| below 10^(−digits + margin)
        means the value is meaningless at this precision and raises
        CerenkovSingularityError.
        """
        digits = digits or mp.dps
        with mp.workdps(max(digits, mp.dps)):
            x = vec(*[to_mpf(c) for c in test_point])
            r_vec = sub(x, source.position)
            distance = norm(r_vec)
            if distance == 0:
                raise DomainError("Test point coincides with the source position")
            n_hat = scale(1 / distance, r_vec)

            beta_vec = source.beta_vec
            sign = branch.sign
            k = 1 - sign * dot(n_hat, beta_vec)

            floor = mpf(10) ** (-digits + settings.CERENKOV_FLOOR_MARGIN)
            if abs(k) < floor:
                magnitude = mp.inf if k == 0 else 1 / (abs(k) ** 3 * distance)
                raise CerenkovSingularityError(mp.nstr(abs(k), 10), mp.nstr(magnitude, 10))

            u = sub(n_hat, scale(sign, beta_vec))
            k3 = k ** 3
            gamma_factor = 1 - dot(beta_vec, beta_vec)
            velocity_term = scale(gamma_factor / (k3 * distance ** 2), u)
            acceleration_term = scale(1 / (k3 * distance), cross(n_hat, cross(u, source.beta_dot)))
            e_field = add(velocity_term, acceleration_term)
            b_field = scale(sign, cross(n_hat, e_field))

            return FieldPair(
                e_field=e_field,
                b_field=b_field,
                k_factor=BigReal.of(k, digits),
                range=BigReal.of(distance, digits),
                n_hat=n_hat,
                branch=branch,
            )

    @staticmethod
    def lorentz_force(e_field: Sequence, b_field: Sequence, beta_vec: Sequence) -> Vec3:
        """E + β × B with q = 1"""
        return add(e_field, cross(beta_vec, b_field))

    # ============================================
    # FINITE-DIFFERENCE ORACLE
    # ============================================

    @staticmethod
    def _retardation_root(beta: mpf, x: Vec3, t: mpf, seed: mpf, spread: mpf, branch: Branch) -> mpf:
        def light_cone(tp):
            position, _, _ = _orbit_state(beta, tp)
            r_vec = sub(x, position)
            return dot(r_vec, r_vec) - (t - tp) ** 2

        try:
            tp = mp.findroot(light_cone, (seed, seed + spread))
        except (ValueError, ZeroDivisionError) as exc:
            raise OracleInvalidError(f"Retardation root lost near t'={mp.nstr(seed, 15)}: {exc}")
        if branch.sign * (t - tp) <= 0:
            raise OracleInvalidError(
                f"Retardation root crossed to the wrong branch (t'={mp.nstr(tp, 15)})"
            )
        return tp

    @staticmethod
    def _potentials(beta: mpf, x: Vec3, tp: mpf, branch: Branch):
        """Φ = 1/(KR) and A = β/(KR) of the source point at time t'"""
        position, velocity, _ = _orbit_state(beta, tp)
        r_vec = sub(x, position)
        distance = norm(r_vec)
        n_hat = scale(1 / distance, r_vec)
        k = 1 - branch.sign * dot(n_hat, velocity)
        phi = 1 / (k * distance)
        return phi, scale(phi, velocity), k, distance

    @staticmethod
    def potential_fields_oracle(
        beta: Number,
        test_point: Sequence = TEST_POINT,
        branch: Branch = Branch.RETARDED,
        step: Number = "1e-4",
        delay: Optional[Number] = None,
        digits: Optional[int] = None,
    ) -> FieldPair:
        """
        E = −∇Φ − ∂A/∂t and B = ∇ × A by central differences.

        Every stencil point re-solves the light-cone condition, seeded at the
        nominal source time t' = ∓delay. A re-solved root that moves further
        than the step allows has jumped to another intersection and raises
        OracleInvalidError.
        """
        digits = digits or digits_of(beta, step)
        with mp.workdps(max(digits, mp.dps)):
            b, h = to_mpf(beta), to_mpf(step)
            if h <= 0:
                raise DomainError("Finite-difference step must be positive")
            x0 = vec(*[to_mpf(c) for c in test_point])
            zero = mpf(0)

            if delay is None:
                # static or slow source: the delay is the distance to the orbit point at phase 0
                delay = norm(sub(x0, _orbit_state(b, zero)[0]))
            seed = -branch.sign * to_mpf(delay)
            t_nominal = FieldService._retardation_root(b, x0, zero, seed, h, branch)
            _, _, k_nominal, distance = FieldService._potentials(b, x0, t_nominal, branch)
            jump_bound = 10 * h * (1 + 1 / abs(k_nominal))

            def evaluate(x: Vec3, t: mpf):
                tp = FieldService._retardation_root(b, x, t, t_nominal, h, branch)
                if abs(tp - t_nominal) > jump_bound:
                    raise OracleInvalidError(
                        f"Stencil root jumped by {mp.nstr(abs(tp - t_nominal), 5)} (step {mp.nstr(h, 5)})"
                    )
                phi, a_vec, _, _ = FieldService._potentials(b, x, tp, branch)
                return phi, a_vec

            grad_phi = []
            d_a = []  # d_a[i][j] = ∂A_j/∂x_i
            for i in range(3):
                offset = [zero, zero, zero]
                offset[i] = h
                phi_plus, a_plus = evaluate(add(x0, offset), zero)
                phi_minus, a_minus = evaluate(sub(x0, offset), zero)
                grad_phi.append((phi_plus - phi_minus) / (2 * h))
                d_a.append([(a_plus[j] - a_minus[j]) / (2 * h) for j in range(3)])

            _, a_later = evaluate(x0, h)
            _, a_earlier = evaluate(x0, -h)
            da_dt = [(a_later[j] - a_earlier[j]) / (2 * h) for j in range(3)]

            e_field = tuple(-grad_phi[j] - da_dt[j] for j in range(3))
            b_field = (
                d_a[1][2] - d_a[2][1],
                d_a[2][0] - d_a[0][2],
                d_a[0][1] - d_a[1][0],
            )
            r_vec = sub(x0, _orbit_state(b, t_nominal)[0])

            return FieldPair(
                e_field=e_field,
                b_field=b_field,
                k_factor=BigReal.of(k_nominal, digits),
                range=BigReal.of(distance, digits),
                n_hat=scale(1 / distance, r_vec),
                branch=branch,
            )
