import pytest
from mpmath import mp, mpf

from tachyon.core.exceptions import AmbiguousRootCount, DomainError
from tachyon.core.numerics import BigReal
from tachyon.services.nullcone_service import NullconeService
from tachyon.services.verify_service import SINGULAR_BETA_REFERENCE, TABLE_TOLERANCE


class TestNullCondition:
    def test_f_vanishes_at_zero_delay(self):
        assert NullconeService.null_f(0, 2).value == 0

    def test_single_root_below_first_singular_speed(self):
        roots = NullconeService.find_roots(2, 30)
        assert len(roots) == 1
        root = roots[0]
        assert abs(root.tau.value - mpf("1.8955")) < mpf("1e-3")
        assert abs(NullconeService.null_f(root.tau, BigReal.of(2, 30)).value) < mpf(10) ** -25
        assert not root.tangent

    def test_roots_ascending_and_inside_window(self):
        roots = NullconeService.find_roots(12, 30)
        taus = [r.tau.value for r in roots]
        assert taus == sorted(taus)
        assert all(0 < t <= 2 for t in taus)

    @pytest.mark.parametrize("beta,expected", [(2, 1), (5, 3), (8, 5), (12, 7)])
    def test_staircase(self, beta, expected):
        assert NullconeService.count_roots(beta, 30) == expected

    def test_count_jumps_by_two_across_singular_speeds(self):
        with mp.workdps(40):
            for velocity in NullconeService.singular_velocities(3, 30):
                below = NullconeService.count_roots(velocity.beta_k.value - mpf("1e-3"), 30)
                above = NullconeService.count_roots(velocity.beta_k.value + mpf("1e-3"), 30)
                assert above - below == 2

    def test_staircase_rows(self):
        rows = NullconeService.staircase(["2", "5"], 30)
        assert [count for _, count in rows] == [1, 3]
        assert rows[0][0].digits == 30

    def test_subluminal_speed_rejected(self):
        with pytest.raises(DomainError):
            NullconeService.find_roots("0.5", 30)

    def test_count_at_a_singular_speed_is_ambiguous(self):
        velocity = NullconeService.singular_velocities(1, 60)[0]
        with pytest.raises(AmbiguousRootCount) as exc:
            NullconeService.count_roots(velocity.beta_k, 30)
        assert exc.value.candidates == (1, 3)

    def test_orbit_k_factor_matches_root(self):
        root = NullconeService.find_roots(5, 30)[1]
        k = NullconeService.orbit_k_factor(BigReal.of(5, 30), root.phi)
        assert abs(k.value - root.k_factor.value) < mpf(10) ** -25


class TestSingularVelocities:
    def test_reference_table(self):
        velocities = NullconeService.singular_velocities(15, 30)
        assert [v.index for v in velocities] == list(range(1, 16))
        with mp.workdps(40):
            for velocity, expected in zip(velocities, SINGULAR_BETA_REFERENCE):
                target = mpf(expected)
                assert abs(velocity.beta_k.value - target) / target < mpf(TABLE_TOLERANCE)

    @pytest.mark.parametrize("digits", [30, 60])
    def test_agrees_with_tan_route(self, digits):
        velocities = NullconeService.singular_velocities(15, digits)
        independent = NullconeService.singular_betas_from_tan(15, digits)
        with mp.workdps(digits + 10):
            for velocity, other in zip(velocities, independent):
                error = abs(velocity.beta_k.value - other.value) / other.value
                assert error < mpf(10) ** -(digits - 5)

    def test_tangency_factor_vanishes(self):
        for velocity in NullconeService.singular_velocities(3, 40):
            assert abs(NullconeService.tangency_factor(velocity.phi_k).value) < mpf(10) ** -35
            assert abs(NullconeService.tangency_g(velocity.phi_k).value) < mpf(10) ** -35

    def test_beta_from_phi(self):
        velocity = NullconeService.singular_velocities(1, 40)[0]
        beta = NullconeService.beta_from_phi(velocity.phi_k)
        assert abs(beta.value - velocity.beta_k.value) < mpf(10) ** -35
        assert NullconeService.beta_from_phi(0).value == 1

    def test_beta_from_phi_needs_positive_sine(self):
        with pytest.raises(DomainError):
            NullconeService.beta_from_phi(4)

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_k_vanishes_at_merged_root(self, k):
        velocity = NullconeService.singular_velocities(k, 50)[-1]
        root = NullconeService.tangent_root(velocity)
        assert root.tangent
        assert abs(root.k_factor.value) < mpf("1e-20")
        assert abs(root.dfdtau.value) < mpf("1e-20")

    def test_k_max_must_be_positive(self):
        with pytest.raises(DomainError):
            NullconeService.singular_velocities(0, 30)
