from enum import Enum
from typing import Any, Literal, Tuple

from mpmath import mpf
from pydantic import BaseModel, ConfigDict, Field, model_validator

from tachyon.core.numerics import BigReal

Vector3 = Tuple[Any, Any, Any]


# ============= Enums =============
class Branch(str, Enum):
    RETARDED = "retarded"
    ADVANCED = "advanced"

    @property
    def sign(self) -> int:
        """+1 for retarded, -1 for advanced (upper/lower sign in the field formulas)"""
        return 1 if self is Branch.RETARDED else -1


class ForceMode(str, Enum):
    FEYNMAN_WHEELER = "feynman_wheeler"
    RETARDED = "retarded"


class SpinChoice(str, Enum):
    """Angular momentum the orbit is quantized to"""
    HBAR = "hbar"
    HBAR_HALF = "hbar_half"


class EnergyTrend(str, Enum):
    GAINING = "gaining"
    RADIATING = "radiating"
    NONE = "none"


# ============= Base Schemas =============
class PhysicsSchema(BaseModel):
    """Base schema with common config"""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


# ============= Units and kinematics =============
class UnitsConvention(PhysicsSchema):
    """Internal normalization; physical units are restored only by selfforce"""
    r: Literal[1] = 1
    c: Literal[1] = 1
    q: Literal[1] = 1
    m0: Literal[1] = 1


NORMALIZED_UNITS = UnitsConvention()


class Kinematics(PhysicsSchema):
    """State of the orbiting charge at one phase of the unit circle"""
    beta: Any
    phase: Any
    position: Vector3
    beta_vec: Vector3
    beta_dot: Vector3


class FieldPair(PhysicsSchema):
    e_field: Vector3
    b_field: Vector3
    k_factor: BigReal
    range: BigReal
    n_hat: Vector3
    branch: Branch


# ============= Null cone =============
class NullRoot(PhysicsSchema):
    """One intersection of the orbit with the test point's light cone"""
    tau: BigReal
    phi: BigReal
    branch: Branch = Branch.RETARDED
    dfdtau: BigReal
    k_factor: BigReal
    tangent: bool = False

    def mirrored(self) -> "NullRoot":
        """Partner root on the opposite branch (equal τ and K)"""
        other = Branch.ADVANCED if self.branch is Branch.RETARDED else Branch.RETARDED
        return self.model_copy(update={"branch": other})


class SingularVelocity(PhysicsSchema):
    index: int = Field(..., ge=1)
    phi_k: BigReal
    beta_k: BigReal


# ============= Self force =============
class ForceSample(PhysicsSchema):
    beta: BigReal
    z_value: BigReal
    epsilon: BigReal
    mode: ForceMode
    n_roots: int = Field(..., ge=0)
    converged: bool
    digits_used: int
    radial_force: BigReal
    azimuthal_force: BigReal

    @model_validator(mode="after")
    def validate_mode(self) -> "ForceSample":
        if self.mode is ForceMode.FEYNMAN_WHEELER and self.epsilon.value != 0:
            raise ValueError("Feynman-Wheeler samples carry epsilon = 0")
        return self

    @property
    def energy_trend(self) -> EnergyTrend:
        """Sign of the azimuthal force relative to the orbital velocity"""
        if self.mode is ForceMode.FEYNMAN_WHEELER or self.azimuthal_force.value == 0:
            return EnergyTrend.NONE
        if self.azimuthal_force.value > mpf(0):
            return EnergyTrend.GAINING
        return EnergyTrend.RADIATING
