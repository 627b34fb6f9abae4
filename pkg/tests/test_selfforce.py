import pytest
from mpmath import mp, mpf

from tachyon.core.exceptions import DomainError, NoBoundOrbitError, TangencyError
from tachyon.core.numerics import BigReal
from tachyon.schemas.physics_schemas import EnergyTrend, ForceMode, SpinChoice
from tachyon.services.nullcone_service import NullconeService
from tachyon.services.selfforce_service import SelfForceService


class TestTotalForce:
    def test_feynman_wheeler_is_radial(self):
        radial, azimuthal, n_roots = SelfForceService.total_force(2, ForceMode.FEYNMAN_WHEELER, 50)
        assert n_roots == 1
        assert abs(radial - mpf("1.4515")) < mpf("1e-3")
        assert abs(azimuthal) < mpf("1e-20") * abs(radial)

    @pytest.mark.parametrize("beta", ["1.5", "3", "8"])
    def test_radial_force_independent_of_mode(self, beta):
        fw, _, _ = SelfForceService.total_force(beta, ForceMode.FEYNMAN_WHEELER, 40)
        retarded, _, _ = SelfForceService.total_force(beta, ForceMode.RETARDED, 40)
        with mp.workdps(40):
            assert abs(fw - retarded) <= mpf("1e-10") * abs(fw)

    def test_retarded_force_has_azimuthal_part(self):
        radial, azimuthal, _ = SelfForceService.total_force(2, ForceMode.RETARDED, 40)
        assert abs(azimuthal - mpf("0.8131")) < mpf("1e-3")
        assert azimuthal / radial > 0

    def test_tangent_root_is_rejected(self):
        velocity = NullconeService.singular_velocities(1, 60)[0]
        with pytest.raises(TangencyError):
            SelfForceService.total_force(velocity.beta_k, ForceMode.FEYNMAN_WHEELER, 30)

    @pytest.mark.parametrize("beta", ["2", "5"])
    def test_reference_evaluator_agrees(self, beta):
        radial, _, _ = SelfForceService.total_force(beta, ForceMode.FEYNMAN_WHEELER, 40)
        reference, azimuthal = SelfForceService.reference_force(beta, 40)
        with mp.workdps(40):
            assert abs(radial - reference.value) < mpf("1e-25") * abs(radial)
            assert abs(azimuthal.value) < mpf("1e-25") * abs(radial)

    def test_reference_roots_match_bracketing_search(self):
        roots = SelfForceService.reference_roots(8, 40)
        found = NullconeService.find_roots(8, 40)
        assert len(roots) == len(found) == 5
        for a, b in zip(roots, found):
            assert abs(a - b.tau.value) < mpf(10) ** -30


class TestPairForce:
    def test_mirror_pair_is_radial(self):
        root = NullconeService.find_roots(2, 40)[0]
        pair = SelfForceService.pair_force(2, root, 40)
        retarded = SelfForceService.retarded_force(2, root, 40)
        with mp.workdps(40):
            assert abs(pair[0] - retarded[0]) < mpf(10) ** -30 * abs(pair[0])
            assert abs(pair[1]) < mpf(10) ** -30 * abs(pair[0])
            assert abs(retarded[1]) > mpf("0.5")


class TestSelfForce:
    def test_sample_in_feynman_wheeler_mode(self, fast_policy):
        sample = SelfForceService.self_force(2, ForceMode.FEYNMAN_WHEELER, fast_policy)
        assert sample.converged
        assert sample.n_roots == 1
        assert sample.z_value.value < 0
        assert sample.z_value == -sample.radial_force
        assert sample.epsilon.value == 0
        assert sample.energy_trend is EnergyTrend.NONE

    def test_sample_in_retarded_mode(self, fast_policy):
        sample = SelfForceService.self_force(2, ForceMode.RETARDED, fast_policy)
        assert sample.converged
        assert sample.epsilon.value > 0
        assert sample.energy_trend is EnergyTrend.GAINING

    def test_z_and_epsilon_shortcuts(self, fast_policy):
        assert SelfForceService.z_of_beta(3, fast_policy).value < 0
        assert SelfForceService.epsilon_of_beta(3, fast_policy, ForceMode.FEYNMAN_WHEELER).value == 0

    @pytest.mark.parametrize("beta", ["1", "0.5"])
    def test_subluminal_speed_rejected(self, beta, fast_policy):
        with pytest.raises(DomainError):
            SelfForceService.self_force(beta, ForceMode.FEYNMAN_WHEELER, fast_policy)


class TestOrbitQuantities:
    def test_equilibrium_radius_balances_the_orbit(self):
        radius = SelfForceService.equilibrium_radius(2, z_value=2)
        with mp.workdps(30):
            assert abs(radius.value - mp.sqrt(3) / 2) < mpf(10) ** -25
        residual = SelfForceService.balance_residual(2, radius, 2)
        assert abs(residual.value) < mpf(10) ** -25

    def test_physical_units(self):
        radius = SelfForceService.equilibrium_radius(2, m0=2, q=3, c=1, z_value=2)
        with mp.workdps(30):
            assert abs(radius.value - 9 * mp.sqrt(3) / 4) < mpf(10) ** -25

    def test_repulsive_force_has_no_orbit(self, fast_policy):
        with pytest.raises(NoBoundOrbitError):
            SelfForceService.equilibrium_radius(2, policy=fast_policy)

    def test_fine_structure_candidate(self):
        assert SelfForceService.fine_structure_candidate(2, SpinChoice.HBAR, z_value=2).value == 1
        half = SelfForceService.fine_structure_candidate(2, SpinChoice.HBAR_HALF, z_value=2)
        assert half.value == mpf("0.5")

    def test_angular_momentum_at_equilibrium(self):
        radius = SelfForceService.equilibrium_radius(2, z_value=2)
        momentum = SelfForceService.angular_momentum(2, radius)
        # L = q^2 Z / (c beta) at the equilibrium radius
        assert abs(momentum.value - 1) < mpf(10) ** -25

    def test_angular_momentum_needs_tachyon(self):
        with pytest.raises(DomainError):
            SelfForceService.angular_momentum(1, 1)


@pytest.mark.slow
class TestFirstSingularSpeed:
    @pytest.fixture
    def beta_1(self):
        return NullconeService.singular_velocities(1, 80)[0].beta_k

    def test_merging_pair_cancels_to_a_finite_force(self, beta_1):
        beta = beta_1 + BigReal.of("1e-30", 80)
        roots = NullconeService.find_roots(beta, 80)
        assert len(roots) == 3
        merging = sorted(roots, key=lambda root: abs(root.k_factor.value))[:2]
        # opposite-sign K on the two roots that were born together
        assert (merging[0].k_factor.value > 0) != (merging[1].k_factor.value > 0)

        forces = [SelfForceService.retarded_force(beta, root, 80)[0] for root in merging]
        with mp.workdps(90):
            assert all(abs(f) > mpf(10) ** 20 for f in forces)
            assert (forces[0] > 0) != (forces[1] > 0)
            assert abs(forces[0] + forces[1]) < 10

    def test_z_jumps_by_a_finite_amount(self, beta_1):
        below = SelfForceService.z_of_beta(beta_1 - BigReal.of("1e-20", 80))
        near = SelfForceService.z_of_beta(beta_1 + BigReal.of("1e-30", 80))
        above = SelfForceService.z_of_beta(beta_1 + BigReal.of("1e-20", 80))
        assert below.value < -2.5
        assert -2 < near.value < -1.99
        with mp.workdps(40):
            assert abs(near.value - above.value) < mpf(10) ** -8
