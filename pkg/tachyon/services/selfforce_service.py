"""
Self-force on the orbiting charge

Sums the field contributions of every null root at the test point (phase 0,
outward radial axis +x, velocity along +y). Z = −F_radial, so positive Z is
attraction; ε = F_azimuthal / F_radial.
"""
from typing import List, Optional, Tuple

from mpmath import mp, mpf

from tachyon.core.config import settings
from tachyon.core.exceptions import DomainError, NoBoundOrbitError, TangencyError
from tachyon.core.logging import get_logger
from tachyon.core.numerics import (
    BigReal,
    Number,
    PrecisionPolicy,
    Vec3,
    add,
    digits_of,
    escalate,
    scale,
    to_mpf,
)
from tachyon.schemas.physics_schemas import (
    Branch,
    ForceMode,
    ForceSample,
    NORMALIZED_UNITS,
    NullRoot,
    SpinChoice,
)
from tachyon.services.field_service import TEST_POINT, FieldService
from tachyon.services.nullcone_service import GUARD_DIGITS, NullconeService

logger = get_logger(__name__)


def _branch_force(beta: mpf, phi: mpf, branch: Branch, digits: int) -> Vec3:
    phase = -phi if branch is Branch.RETARDED else phi
    source = FieldService.kinematics_at(beta, phase)
    fields = FieldService.lw_fields(source, TEST_POINT, branch, digits)
    test_velocity = (mpf(0), beta, mpf(0))
    return FieldService.lorentz_force(fields.e_field, fields.b_field, test_velocity)


class SelfForceService:
    """Z(β), ε(β) and the orbit quantities derived from them"""

    @staticmethod
    def pair_force(beta: Number, root: NullRoot, digits: int) -> Vec3:
        """
        Time-symmetric force of one mirror pair: half the retarded
        contribution from phase −φ plus half the advanced one from +φ.
        """
        with mp.workdps(digits + GUARD_DIGITS):
            b, phi = to_mpf(beta), to_mpf(root.phi)
            retarded = _branch_force(b, phi, Branch.RETARDED, digits)
            advanced = _branch_force(b, phi, Branch.ADVANCED, digits)
            return scale(mpf(1) / 2, add(retarded, advanced))

    @staticmethod
    def retarded_force(beta: Number, root: NullRoot, digits: int) -> Vec3:
        """Full-weight causal force of one root"""
        with mp.workdps(digits + GUARD_DIGITS):
            return _branch_force(to_mpf(beta), to_mpf(root.phi), Branch.RETARDED, digits)

    @staticmethod
    def total_force(beta: Number, mode: ForceMode, digits: int) -> Tuple[mpf, mpf, int]:
        """
        (F_radial, F_azimuthal, N) summed over all roots at a fixed precision.

        Terms are added in ascending τ with compensated summation. A tangent
        root makes this rung unusable and raises TangencyError.
        """
        roots = NullconeService.find_roots(beta, digits)
        if any(root.tangent for root in roots):
            raise TangencyError(
                f"Tangent null root at {digits} digits",
                {"digits": digits, "n_roots": len(roots)},
            )

        contribution = (
            SelfForceService.pair_force
            if mode is ForceMode.FEYNMAN_WHEELER
            else SelfForceService.retarded_force
        )
        with mp.workdps(digits + GUARD_DIGITS):
            forces = [contribution(beta, root, digits) for root in roots]
            radial = mp.fsum(f[0] for f in forces)
            azimuthal = mp.fsum(f[1] for f in forces)
        return radial, azimuthal, len(roots)

    @staticmethod
    def self_force(
        beta: Number,
        mode: ForceMode = ForceMode.FEYNMAN_WHEELER,
        policy: Optional[PrecisionPolicy] = None,
    ) -> ForceSample:
        """Evaluate the self-force under the precision ladder"""
        policy = policy or settings.default_policy()
        with mp.workdps(policy.start_digits):
            if to_mpf(beta) <= 1:
                raise DomainError(f"self_force requires beta > 1 (got {beta})")

        def evaluate(digits: int):
            radial, azimuthal, n_roots = SelfForceService.total_force(beta, mode, digits)
            with mp.workdps(digits + GUARD_DIGITS):
                z_value = -radial
                if mode is ForceMode.FEYNMAN_WHEELER:
                    epsilon = mpf(0)
                else:
                    epsilon = azimuthal / radial
            return z_value, epsilon, radial, azimuthal, n_roots

        result = escalate(evaluate, policy, project=lambda v: (v[0], v[1]))
        z_value, epsilon, radial, azimuthal, n_roots = result.value
        digits = result.digits_used

        if not result.converged:
            logger.warning(f"Self-force at beta={beta} did not converge below {policy.max_digits} digits")

        return ForceSample(
            beta=BigReal.of(beta, digits),
            z_value=BigReal.of(z_value, digits),
            epsilon=BigReal.of(epsilon, digits),
            mode=mode,
            n_roots=n_roots,
            converged=result.converged,
            digits_used=digits,
            radial_force=BigReal.of(radial, digits),
            azimuthal_force=BigReal.of(azimuthal, digits),
        )

    @staticmethod
    def z_of_beta(beta: Number, policy: Optional[PrecisionPolicy] = None) -> BigReal:
        """Dimensionless radial self-force Z(β)"""
        return SelfForceService.self_force(beta, ForceMode.FEYNMAN_WHEELER, policy).z_value

    @staticmethod
    def epsilon_of_beta(
        beta: Number,
        policy: Optional[PrecisionPolicy] = None,
        mode: ForceMode = ForceMode.RETARDED,
    ) -> BigReal:
        """Azimuthal-to-radial ratio ε(β); zero in Feynman-Wheeler mode"""
        return SelfForceService.self_force(beta, mode, policy).epsilon

    # ============================================
    # ORBIT QUANTITIES (physical units)
    # ============================================

    @staticmethod
    def _attractive_z(beta: Number, policy: Optional[PrecisionPolicy], z_value: Optional[Number]) -> BigReal:
        z = (
            SelfForceService.z_of_beta(beta, policy)
            if z_value is None
            else BigReal.of(z_value, (policy or settings.default_policy()).start_digits)
        )
        if z.value <= 0:
            raise NoBoundOrbitError(str(beta), mp.nstr(z.value, 15))
        return z

    @staticmethod
    def equilibrium_radius(
        beta: Number,
        m0: Number = NORMALIZED_UNITS.m0,
        q: Number = NORMALIZED_UNITS.q,
        policy: Optional[PrecisionPolicy] = None,
        c: Number = NORMALIZED_UNITS.c,
        z_value: Optional[Number] = None,
    ) -> BigReal:
        """
        Radius at which the self-force supplies the centripetal force:
        r = √(β² − 1)/(m0 c² β²) · q² Z(β). `z_value` bypasses the evaluation.
        """
        z = SelfForceService._attractive_z(beta, policy, z_value)
        with mp.workdps(z.digits + GUARD_DIGITS):
            b = to_mpf(beta)
            radius = mp.sqrt(b * b - 1) / (to_mpf(m0) * to_mpf(c) ** 2 * b * b) * to_mpf(q) ** 2 * z.value
        return BigReal.of(radius, z.digits)

    @staticmethod
    def balance_residual(
        beta: Number,
        radius: Number,
        z_value: Number,
        m0: Number = NORMALIZED_UNITS.m0,
        q: Number = NORMALIZED_UNITS.q,
        c: Number = NORMALIZED_UNITS.c,
    ) -> BigReal:
        """q²Z/r² minus the centripetal requirement p·v/r of the tachyon"""
        digits = digits_of(beta, radius, z_value)
        with mp.workdps(digits + GUARD_DIGITS):
            b, r = to_mpf(beta), to_mpf(radius)
            mass, charge, light = to_mpf(m0), to_mpf(q), to_mpf(c)
            pulled = charge ** 2 * to_mpf(z_value) / r ** 2
            required = mass * light ** 2 * b * b / (mp.sqrt(b * b - 1) * r)
            return BigReal.of(pulled - required, digits)

    @staticmethod
    def angular_momentum(
        beta: Number,
        radius: Number,
        m0: Number = NORMALIZED_UNITS.m0,
        c: Number = NORMALIZED_UNITS.c,
    ) -> BigReal:
        """L = m0 c β r / √(β² − 1)"""
        digits = digits_of(beta, radius)
        with mp.workdps(digits + GUARD_DIGITS):
            b = to_mpf(beta)
            if b <= 1:
                raise DomainError(f"angular_momentum requires beta > 1 (got {mp.nstr(b, 20)})")
            value = to_mpf(m0) * to_mpf(c) * b * to_mpf(radius) / mp.sqrt(b * b - 1)
        return BigReal.of(value, digits)

    @staticmethod
    def fine_structure_candidate(
        beta: Number,
        spin_choice: SpinChoice = SpinChoice.HBAR,
        policy: Optional[PrecisionPolicy] = None,
        z_value: Optional[Number] = None,
    ) -> BigReal:
        """
        Coupling q²/(ħc) obtained by equating the orbital angular momentum at
        the equilibrium radius to ħ or ħ/2. L = q²Z/(cβ) there, so α = β/Z
        for ħ and β/(2Z) for ħ/2.
        """
        z = SelfForceService._attractive_z(beta, policy, z_value)
        with mp.workdps(z.digits + GUARD_DIGITS):
            alpha = to_mpf(beta) / z.value
            if spin_choice is SpinChoice.HBAR_HALF:
                alpha = alpha / 2
        return BigReal.of(alpha, z.digits)

    # ============================================
    # INDEPENDENT EVALUATOR
    # ============================================

    @staticmethod
    def reference_roots(beta: Number, digits: int) -> List[mpf]:
        """
        Null roots found lobe by lobe: on the j-th half period of βτ/2 the
        condition reads 2(−1)^j sin(βτ/2) = τ, a hump minus a line, which has
        a root on each side of its maximum at βτ/2 = jπ + acos(1/β) when the
        maximum is positive.
        """
        with mp.workdps(digits + GUARD_DIGITS):
            b = to_mpf(beta)
            peak_offset = mp.acos(1 / b)
            roots: List[mpf] = []
            j = 0
            while 2 * j * mp.pi / b < 2:
                sign = -1 if j % 2 else 1
                hump = lambda t, s=sign: 2 * s * mp.sin(b * t / 2) - t  # noqa: E731
                start = 2 * j * mp.pi / b
                peak = 2 * (j * mp.pi + peak_offset) / b
                end = 2 * (j + 1) * mp.pi / b
                height = hump(peak)
                if abs(height) < mpf(10) ** (-digits):
                    raise TangencyError(f"Lobe {j} touches the light cone at beta={mp.nstr(b, 20)}")
                if height > 0:
                    if j > 0:
                        roots.append(mp.findroot(hump, (start, peak), solver="anderson"))
                    roots.append(mp.findroot(hump, (peak, end), solver="anderson"))
                j += 1
            return roots

    @staticmethod
    def reference_force(
        beta: Number,
        digits: int,
        mode: ForceMode = ForceMode.FEYNMAN_WHEELER,
    ) -> Tuple[BigReal, BigReal]:
        """
        (F_radial, F_azimuthal) from a complex-plane form of the fields.

        Points of the orbit plane are complex numbers, the test point is 1
        and a·b = Re(conj(a)·b). The acceleration term is expanded as
        u(n·a) − a(n·u) and B is the scalar out-of-plane component.
        """
        with mp.workdps(digits + GUARD_DIGITS):
            b = to_mpf(beta)
            test_velocity = mp.mpc(0, b)

            def inner(x, y):
                return mp.re(mp.conj(x) * y)

            def branch_force(phi, sign):
                w = mp.expj(-sign * phi)
                velocity = 1j * b * w
                acceleration = -b * b * w
                separation = 1 - w
                distance = abs(separation)
                n = separation / distance
                k = 1 - sign * inner(n, velocity)
                u = n - sign * velocity
                e = (u * (1 - b * b) / distance + u * inner(n, acceleration) - acceleration * inner(n, u)) \
                    / (k ** 3 * distance)
                b_out = sign * mp.im(mp.conj(n) * e)
                return e - 1j * b_out * test_velocity

            terms = []
            for tau in SelfForceService.reference_roots(b, digits):
                phi = b * tau
                if mode is ForceMode.FEYNMAN_WHEELER:
                    terms.append((branch_force(phi, 1) + branch_force(phi, -1)) / 2)
                else:
                    terms.append(branch_force(phi, 1))
            radial = mp.fsum(mp.re(t) for t in terms)
            azimuthal = mp.fsum(mp.im(t) for t in terms)
        return BigReal.of(radial, digits), BigReal.of(azimuthal, digits)
