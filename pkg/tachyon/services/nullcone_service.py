"""
Null-cone intersections of the circular orbit

With r = c = 1 and the test point at phase 0, a source point a delay τ in
the past satisfies f(τ, β) = 2 − 2cos(βτ) − τ² = 0. Two roots merge (and
the root count jumps by two) exactly where ∂f/∂τ vanishes too, which
reduces to g(φ) = 2 − 2cos φ − φ sin φ = 0 with φ = βτ.
"""
from typing import List, Optional, Sequence, Tuple

from mpmath import mp, mpf

from tachyon.core.config import settings
from tachyon.core.exceptions import AmbiguousRootCount, DomainError
from tachyon.core.logging import get_logger
from tachyon.core.numerics import BigReal, Number, bracketed_newton, digits_of, to_mpf
from tachyon.schemas.physics_schemas import Branch, NullRoot, SingularVelocity

logger = get_logger(__name__)

GUARD_DIGITS = 10


def _f(tau: mpf, beta: mpf) -> mpf:
    return 2 - 2 * mp.cos(beta * tau) - tau * tau


def _dfdtau(tau: mpf, beta: mpf) -> mpf:
    return 2 * beta * mp.sin(beta * tau) - 2 * tau


def _d2fdtau2(tau: mpf, beta: mpf) -> mpf:
    return 2 * beta * beta * mp.cos(beta * tau) - 2


class NullconeService:
    """Root spectrum of the null condition and the singular velocities"""

    # ============================================
    # NULL CONDITION
    # ============================================

    @staticmethod
    def null_f(tau: Number, beta: Number) -> BigReal:
        """f(τ, β) = 2 − 2cos(βτ) − τ² at the operands' precision"""
        digits = digits_of(tau, beta)
        with mp.workdps(digits + GUARD_DIGITS):
            value = _f(to_mpf(tau), to_mpf(beta))
        return BigReal.of(value, digits)

    @staticmethod
    def orbit_k_factor(beta: Number, phi: Number) -> BigReal:
        """
        On-orbit K factor of a source a phase φ behind the test point:
        1 − β sin φ / √(2 − 2cos φ). Identical for the mirrored advanced source.
        """
        digits = digits_of(beta, phi)
        with mp.workdps(digits + GUARD_DIGITS):
            b, p = to_mpf(beta), to_mpf(phi)
            chord = mp.sqrt(2 - 2 * mp.cos(p))
            if chord == 0:
                raise DomainError("K factor undefined at the source's present location")
            value = 1 - b * mp.sin(p) / chord
        return BigReal.of(value, digits)

    @staticmethod
    def find_roots(beta: Number, digits: int) -> List[NullRoot]:
        """
        All retarded roots of f(τ, β) = 0 in (0, 2], ascending in τ.

        The grid samples cos(βτ) at least 16 times per period. Besides sign
        changes of f, every cell is checked for a sign change of ∂f/∂τ so a
        root pair narrower than the grid step is split at the extremum. A
        root whose derivative vanishes at the working precision is returned
        with `tangent=True`.
        """
        with mp.workdps(digits + GUARD_DIGITS):
            b = to_mpf(beta)
            if b <= 1:
                raise DomainError(f"find_roots requires beta > 1 (got {mp.nstr(b, 20)})")

            tol = mpf(10) ** (-(digits + 5))
            tangency_threshold = mpf(10) ** (-(digits // 2))
            flat_threshold = mpf(10) ** (-digits)
            exclusion = mpf(settings.TAU_EXCLUSION)
            step = min(mp.pi / (8 * b), mpf(settings.ROOT_GRID_MAX_STEP))
            cells = int(mp.ceil(2 / step))

            f = lambda t: _f(t, b)  # noqa: E731
            df = lambda t: _dfdtau(t, b)  # noqa: E731
            d2f = lambda t: _d2fdtau2(t, b)  # noqa: E731

            grid = [exclusion] + [mpf(2) * i / cells for i in range(1, cells + 1)]
            values = [f(t) for t in grid]
            slopes = [df(t) for t in grid]

            found: List[Tuple[mpf, bool]] = []
            for i in range(len(grid) - 1):
                a, c = grid[i], grid[i + 1]
                fa, fc = values[i], values[i + 1]

                if fc == 0:
                    found.append((c, False))
                    continue
                if fa == 0:
                    continue
                if (fa > 0) != (fc > 0):
                    found.append((bracketed_newton(f, df, a, c, tol), False))
                    continue

                # same sign at both ends: look for an extremum crossing zero
                sa, sc = slopes[i], slopes[i + 1]
                if sa == 0 or sc == 0 or (sa > 0) == (sc > 0):
                    continue
                peak = bracketed_newton(df, d2f, a, c, tol)
                fp = f(peak)
                if abs(fp) <= flat_threshold:
                    found.append((peak, True))
                elif (fp > 0) != (fa > 0):
                    found.append((bracketed_newton(f, df, a, peak, tol), False))
                    found.append((bracketed_newton(f, df, peak, c, tol), False))

            roots: List[NullRoot] = []
            for tau, tangent in sorted(found, key=lambda item: item[0]):
                if tau < exclusion:
                    continue
                slope = df(tau)
                tangent = tangent or abs(slope) < tangency_threshold
                phi = b * tau
                chord = mp.sqrt(2 - 2 * mp.cos(phi))
                k_value = 1 - b * mp.sin(phi) / chord
                roots.append(NullRoot(
                    tau=BigReal.of(tau, digits),
                    phi=BigReal.of(phi, digits),
                    branch=Branch.RETARDED,
                    dfdtau=BigReal.of(slope, digits),
                    k_factor=BigReal.of(k_value, digits),
                    tangent=tangent,
                ))
                if tangent:
                    logger.warning(
                        f"Tangent null root at beta={mp.nstr(b, 20)}, tau={mp.nstr(tau, 20)}"
                    )

        logger.debug(f"beta={mp.nstr(b, 20)}: {len(roots)} null root(s) at {digits} digits")
        return roots

    @staticmethod
    def count_roots(beta: Number, digits: Optional[int] = None) -> int:
        """N(β), the number of retarded roots; odd away from the singular velocities"""
        digits = digits or settings.START_DIGITS
        roots = NullconeService.find_roots(beta, digits)
        if any(root.tangent for root in roots):
            n = len(roots)
            candidates = (n - 1, n + 1) if n % 2 == 0 else (n, n + 2)
            raise AmbiguousRootCount(mp.nstr(to_mpf(beta), 20), candidates)
        return len(roots)

    @staticmethod
    def staircase(betas: Sequence[Number], digits: Optional[int] = None) -> List[Tuple[BigReal, int]]:
        """(β, N(β)) for each requested speed"""
        digits = digits or settings.START_DIGITS
        return [
            (BigReal.of(beta, digits), NullconeService.count_roots(beta, digits))
            for beta in betas
        ]

    # ============================================
    # SINGULAR VELOCITIES
    # ============================================

    @staticmethod
    def tangency_g(phi: Number) -> BigReal:
        """g(φ) = 2 − 2cos φ − φ sin φ"""
        digits = digits_of(phi)
        with mp.workdps(digits + GUARD_DIGITS):
            p = to_mpf(phi)
            value = 2 - 2 * mp.cos(p) - p * mp.sin(p)
        return BigReal.of(value, digits)

    @staticmethod
    def tangency_factor(phi: Number) -> BigReal:
        """
        2 sin(φ/2) − φ cos(φ/2); g(φ) = 2 sin(φ/2) times this factor, so its
        zeros are the non-trivial zeros of g (tan(φ/2) = φ/2).
        """
        digits = digits_of(phi)
        with mp.workdps(digits + GUARD_DIGITS):
            p = to_mpf(phi)
            value = 2 * mp.sin(p / 2) - p * mp.cos(p / 2)
        return BigReal.of(value, digits)

    @staticmethod
    def beta_from_phi(phi: Number) -> BigReal:
        """β = √(φ / sin φ); requires sin φ > 0"""
        digits = digits_of(phi)
        with mp.workdps(digits + GUARD_DIGITS):
            p = to_mpf(phi)
            if p == 0:
                return BigReal.of(1, digits)
            s = mp.sin(p)
            if s <= 0 or p / s <= 0:
                raise DomainError(
                    f"sin(phi) must be positive for a real beta (phi={mp.nstr(p, 20)})",
                    {"phi": mp.nstr(p, 20)},
                )
            value = mp.sqrt(p / s)
        return BigReal.of(value, digits)

    @staticmethod
    def singular_velocities(k_max: int, digits: int) -> List[SingularVelocity]:
        """
        First `k_max` speeds at which two null roots merge, ascending.

        The k-th non-trivial zero of g lies in (2πk, 2πk + π), where sin φ > 0;
        the factor 2 sin(φ/2) − φ cos(φ/2) changes sign across that interval
        while g itself vanishes at the excluded endpoint 2πk.
        """
        if k_max < 1:
            raise DomainError(f"k_max must be at least 1 (got {k_max})")

        velocities: List[SingularVelocity] = []
        with mp.workdps(digits + GUARD_DIGITS):
            tol = mpf(10) ** (-(digits + 5))
            factor = lambda p: 2 * mp.sin(p / 2) - p * mp.cos(p / 2)  # noqa: E731
            dfactor = lambda p: p * mp.sin(p / 2) / 2  # noqa: E731

            for k in range(1, k_max + 1):
                lo = 2 * mp.pi * k
                hi = lo + mp.pi
                phi = bracketed_newton(factor, dfactor, lo, hi, tol * hi)
                beta = mp.sqrt(phi / mp.sin(phi))
                velocities.append(SingularVelocity(
                    index=k,
                    phi_k=BigReal.of(phi, digits),
                    beta_k=BigReal.of(beta, digits),
                ))

        logger.debug(f"Computed {k_max} singular velocities at {digits} digits")
        return velocities

    @staticmethod
    def singular_betas_from_tan(k_max: int, digits: int) -> List[BigReal]:
        """
        β_k through the half-angle route: x = φ/2 solves tan x = x.

        Written as sin x − x cos x = 0, which changes sign across
        (πk, πk + π/2), and solved with mpmath's Illinois bracketing solver,
        independently of the Newton search in `singular_velocities`.
        """
        if k_max < 1:
            raise DomainError(f"k_max must be at least 1 (got {k_max})")

        betas: List[BigReal] = []
        with mp.workdps(digits + GUARD_DIGITS):
            for k in range(1, k_max + 1):
                lo, hi = mp.pi * k, mp.pi * k + mp.pi / 2
                x = mp.findroot(
                    lambda t: mp.sin(t) - t * mp.cos(t), (lo, hi), solver="illinois", maxsteps=200
                )
                betas.append(BigReal.of(mp.sqrt(2 * x / mp.sin(2 * x)), digits))
        return betas

    @staticmethod
    def tangent_root(velocity: SingularVelocity, digits: Optional[int] = None) -> NullRoot:
        """The merged root at (φ_k, β_k); its K factor vanishes"""
        digits = digits or velocity.phi_k.digits
        with mp.workdps(digits + GUARD_DIGITS):
            phi, beta = to_mpf(velocity.phi_k), to_mpf(velocity.beta_k)
            tau = phi / beta
            slope = _dfdtau(tau, beta)
        return NullRoot(
            tau=BigReal.of(tau, digits),
            phi=BigReal.of(phi, digits),
            branch=Branch.RETARDED,
            dfdtau=BigReal.of(slope, digits),
            k_factor=NullconeService.orbit_k_factor(BigReal.of(beta, digits), BigReal.of(phi, digits)),
            tangent=True,
        )
