from typing import List, Literal, Optional

from pydantic import Field, field_validator, model_validator

from tachyon import __version__
from tachyon.core.numerics import BigReal, PrecisionPolicy
from tachyon.schemas.physics_schemas import ForceMode, ForceSample, PhysicsSchema


# ============= Scan configuration =============
class ScanConfig(PhysicsSchema):
    """Uniform β grid with optional windows cut out around the singular velocities"""
    beta_min: BigReal
    beta_max: BigReal
    samples: int = Field(..., ge=2)
    mode: ForceMode = ForceMode.FEYNMAN_WHEELER
    policy: PrecisionPolicy = Field(default_factory=PrecisionPolicy)
    exclusion_radius: BigReal = Field(default_factory=lambda: BigReal.of("0.05", 15))

    @field_validator("exclusion_radius")
    @classmethod
    def validate_radius(cls, v: BigReal) -> BigReal:
        if v.value < 0:
            raise ValueError("exclusion_radius must be non-negative")
        return v

    @model_validator(mode="after")
    def validate_range(self) -> "ScanConfig":
        if self.beta_min.value <= 1:
            raise ValueError("beta_min must exceed 1")
        if self.beta_max.value <= self.beta_min.value:
            raise ValueError("beta_max must exceed beta_min")
        return self


class ScanMetadata(PhysicsSchema):
    tool_version: str = __version__
    kind: Literal["sweep", "zoom"] = "sweep"
    timestamp: Optional[str] = None
    eigenvalues: List[BigReal] = Field(default_factory=list)


# ============= Results =============
class ScanResult(PhysicsSchema):
    config: ScanConfig
    samples: List[ForceSample] = Field(default_factory=list)
    metadata: ScanMetadata = Field(default_factory=ScanMetadata)

    @model_validator(mode="after")
    def validate_samples(self) -> "ScanResult":
        for previous, current in zip(self.samples, self.samples[1:]):
            if not previous.beta.value < current.beta.value:
                raise ValueError("samples must be strictly ascending in beta")
        if any(s.mode is not self.config.mode for s in self.samples):
            raise ValueError("every sample must use the configured force mode")
        return self


class Census(PhysicsSchema):
    """Sign statistics of Z over converged samples"""
    n_positive: int = 0
    n_negative: int = 0
    n_alternations: int = 0
    n_unconverged: int = 0


class CensusLevel(PhysicsSchema):
    level: int = Field(..., ge=0)
    samples: int = Field(..., ge=2)
    census: Census
