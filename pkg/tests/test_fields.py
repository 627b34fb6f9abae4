import pytest
from mpmath import mp, mpf
from pydantic import ValidationError

from tachyon.core.exceptions import CerenkovSingularityError, DomainError
from tachyon.core.numerics import BigReal, dot, norm, sub
from tachyon.schemas.physics_schemas import NORMALIZED_UNITS, Branch, UnitsConvention
from tachyon.services.field_service import TEST_POINT, FieldService
from tachyon.services.nullcone_service import NullconeService


def _relative_error(approx, exact):
    return norm(sub(approx, exact)) / norm(exact)


class TestKinematics:
    def test_test_point_state(self):
        with mp.workdps(30):
            state = FieldService.kinematics_at(2, 0)
            assert state.position == (1, 0, 0)
            assert state.beta_vec == (0, 2, 0)
            assert state.beta_dot == (-4, 0, 0)

    def test_test_point_sits_on_the_unit_orbit(self):
        assert TEST_POINT == (NORMALIZED_UNITS.r, 0, 0)
        with mp.workdps(30):
            assert FieldService.kinematics_at(2, 0).position == TEST_POINT

    def test_units_are_fixed_to_one(self):
        with pytest.raises(ValidationError):
            UnitsConvention(r=2)

    def test_negative_speed_rejected(self):
        with pytest.raises(DomainError):
            FieldService.kinematics_at(-1, 0)

    def test_source_phase_follows_branch(self):
        root = NullconeService.find_roots(2, 30)[0]
        retarded = FieldService.source_kinematics(BigReal.of(2, 30), root)
        advanced = FieldService.source_kinematics(BigReal.of(2, 30), root.mirrored())
        with mp.workdps(30):
            assert abs(retarded.phase + root.phi.value) < mpf(10) ** -25
            assert abs(advanced.phase - root.phi.value) < mpf(10) ** -25
            # mirror images across the x axis
            assert abs(retarded.position[1] + advanced.position[1]) < mpf(10) ** -25


class TestLienardWiechert:
    def test_k_factor_sign_convention(self):
        with mp.workdps(30):
            n_hat = (mpf(0), mpf(1), mpf(0))
            beta_vec = (mpf(0), mpf("0.5"), mpf(0))
            assert FieldService.k_factor(n_hat, beta_vec, Branch.RETARDED, 30).value == mpf("0.5")
            assert FieldService.k_factor(n_hat, beta_vec, Branch.ADVANCED, 30).value == mpf("1.5")

    @pytest.mark.parametrize("branch", [Branch.RETARDED, Branch.ADVANCED])
    def test_k_factor_matches_orbit_formula(self, branch):
        root = NullconeService.find_roots(5, 30)[2]
        source = FieldService.source_kinematics(BigReal.of(5, 30), root.model_copy(update={"branch": branch}))
        fields = FieldService.lw_fields(source, TEST_POINT, branch, 30)
        assert abs(fields.k_factor.value - root.k_factor.value) < mpf(10) ** -25

    def test_magnetic_field_perpendicular_to_electric(self):
        root = NullconeService.find_roots(3, 30)[0]
        source = FieldService.source_kinematics(BigReal.of(3, 30), root)
        fields = FieldService.lw_fields(source, TEST_POINT, Branch.RETARDED, 30)
        with mp.workdps(30):
            assert abs(dot(fields.e_field, fields.b_field)) < mpf(10) ** -25 * norm(fields.e_field) ** 2
            assert abs(dot(fields.b_field, fields.n_hat)) < mpf(10) ** -25 * norm(fields.b_field)

    def test_static_charge_is_coulomb(self):
        with mp.workdps(30):
            source = FieldService.kinematics_at(0, 0)
            fields = FieldService.lw_fields(source, (3, 0, 0), Branch.RETARDED, 30)
            assert abs(fields.e_field[0] - mpf("0.25")) < mpf(10) ** -25
            assert norm(fields.b_field) == 0

    def test_coincident_point_rejected(self):
        with mp.workdps(30):
            source = FieldService.kinematics_at(2, 0)
            with pytest.raises(DomainError):
                FieldService.lw_fields(source, TEST_POINT, Branch.RETARDED, 30)

    def test_cerenkov_singularity(self):
        velocity = NullconeService.singular_velocities(1, 60)[0]
        root = NullconeService.tangent_root(velocity)
        source = FieldService.source_kinematics(velocity.beta_k, root)
        with pytest.raises(CerenkovSingularityError) as exc:
            FieldService.lw_fields(source, TEST_POINT, Branch.RETARDED, 30)
        assert "k_factor" in exc.value.detail


class TestFiniteDifferenceOracle:
    def test_static_charge(self):
        oracle = FieldService.potential_fields_oracle(0, (3, 0, 0), Branch.RETARDED, "1e-4", digits=30)
        with mp.workdps(30):
            assert abs(oracle.e_field[0] - mpf("0.25")) < mpf("1e-7")
            assert abs(oracle.e_field[1]) < mpf("1e-20")
            assert norm(oracle.b_field) < mpf("1e-20")

    @pytest.mark.parametrize("branch", [Branch.RETARDED, Branch.ADVANCED])
    def test_matches_closed_form(self, branch):
        root = NullconeService.find_roots(2, 40)[0]
        source = FieldService.source_kinematics(BigReal.of(2, 40), root.model_copy(update={"branch": branch}))
        exact = FieldService.lw_fields(source, TEST_POINT, branch, 40)
        oracle = FieldService.potential_fields_oracle(2, TEST_POINT, branch, "1e-4", delay=root.tau, digits=40)
        with mp.workdps(40):
            assert _relative_error(oracle.e_field, exact.e_field) < mpf("1e-5")
            assert _relative_error(oracle.b_field, exact.b_field) < mpf("1e-5")

    def test_second_order_convergence(self):
        root = NullconeService.find_roots("2.5", 40)[-1]
        source = FieldService.source_kinematics(BigReal.of("2.5", 40), root)
        exact = FieldService.lw_fields(source, TEST_POINT, Branch.RETARDED, 40).e_field
        with mp.workdps(40):
            errors = [
                norm(sub(
                    FieldService.potential_fields_oracle(
                        "2.5", TEST_POINT, Branch.RETARDED, h, delay=root.tau, digits=40
                    ).e_field,
                    exact,
                ))
                for h in (mpf("1e-4"), mpf("5e-5"))
            ]
            order = mp.log(errors[0] / errors[1], 2)
        assert 1.7 < float(order) < 2.3

    def test_step_must_be_positive(self):
        with pytest.raises(DomainError):
            FieldService.potential_fields_oracle(2, TEST_POINT, Branch.RETARDED, "0", delay="1.9", digits=30)


class TestLorentzForce:
    def test_magnetic_part(self):
        with mp.workdps(30):
            force = FieldService.lorentz_force((1, 0, 0), (0, 0, 1), (0, 2, 0))
            assert force == (3, 0, 0)

    def test_static_field(self):
        with mp.workdps(30):
            assert FieldService.lorentz_force((0, mpf("0.5"), 0), (0, 0, 0), (0, 2, 0)) == (0, mpf("0.5"), 0)
