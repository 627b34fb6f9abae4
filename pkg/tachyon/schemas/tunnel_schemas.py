from enum import Enum
from typing import List, Literal, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator


class SegmentTag(str, Enum):
    INCIDENT_FORWARD = "incident_forward"
    FORBIDDEN_BACKWARD = "forbidden_backward"
    TRANSMITTED_FORWARD = "transmitted_forward"
    REFLECTED = "reflected"


class Outcome(str, Enum):
    TUNNELED = "tunneled"
    REFLECTED = "reflected"


class TunnelSchema(BaseModel):
    model_config = ConfigDict(frozen=True)


# ============= Barrier =============
class BarrierProfile(TunnelSchema):
    """Trapezoid: zero, linear rise, plateau at u_max, linear fall, zero"""
    u_max: float = Field(..., ge=0)
    x_rise: float
    x_plateau_start: float
    x_plateau_end: float
    x_fall: float

    @model_validator(mode="after")
    def validate_shape(self) -> "BarrierProfile":
        if not self.x_rise <= self.x_plateau_start <= self.x_plateau_end <= self.x_fall:
            raise ValueError("barrier corners must satisfy x_rise <= x_plateau_start <= x_plateau_end <= x_fall")
        if self.x_rise == self.x_plateau_start or self.x_plateau_end == self.x_fall:
            raise ValueError("barrier ramps must have finite slope")
        return self

    @property
    def kinks(self) -> Tuple[float, float, float, float]:
        return (self.x_rise, self.x_plateau_start, self.x_plateau_end, self.x_fall)

    @property
    def rise_slope(self) -> float:
        return self.u_max / (self.x_plateau_start - self.x_rise)

    @property
    def fall_slope(self) -> float:
        return -self.u_max / (self.x_fall - self.x_plateau_end)

    def potential(self, x: float) -> float:
        if x <= self.x_rise or x >= self.x_fall:
            return 0.0
        if x < self.x_plateau_start:
            return self.rise_slope * (x - self.x_rise)
        if x <= self.x_plateau_end:
            return self.u_max
        return self.u_max + self.fall_slope * (x - self.x_plateau_end)

    def slope(self, x: float) -> float:
        """dU/dx, taken from the right at the kinks"""
        if x < self.x_rise or x >= self.x_fall:
            return 0.0
        if x < self.x_plateau_start:
            return self.rise_slope
        if x < self.x_plateau_end:
            return 0.0
        return self.fall_slope

    def mirrored(self) -> "BarrierProfile":
        """Same barrier seen along −x"""
        return BarrierProfile(
            u_max=self.u_max,
            x_rise=-self.x_fall,
            x_plateau_start=-self.x_plateau_end,
            x_plateau_end=-self.x_plateau_start,
            x_fall=-self.x_rise,
        )


# ============= Trajectory =============
class TunnelState(TunnelSchema):
    position: Tuple[float, float]
    momentum: Tuple[float, float]
    coord_time: float
    time_direction: Literal[1, -1]
    segment: SegmentTag
    kinetic_energy: float = Field(0.0, ge=0)


class Trajectory(TunnelSchema):
    states: List[TunnelState]
    outcome: Outcome
    e_total: float
    m0: float = 1.0
    turning_points: List[float] = Field(default_factory=list)
    entry_time: Optional[float] = None
    exit_time: Optional[float] = None

    @property
    def segments(self) -> List[SegmentTag]:
        """Segment tags in order of appearance"""
        tags: List[SegmentTag] = []
        for state in self.states:
            if not tags or tags[-1] is not state.segment:
                tags.append(state.segment)
        return tags


class IncidenceResult(TunnelSchema):
    outcome: Outcome
    turning_x: Optional[float] = None


class IncidenceStatistics(TunnelSchema):
    samples: int
    seed: int
    n_tunneled: int
    n_reflected: int

    @property
    def transmission(self) -> float:
        return self.n_tunneled / self.samples if self.samples else 0.0


# ============= Run configuration =============
class TunnelConfig(TunnelSchema):
    """Parameters of one tunneling run, as read from a config file"""
    e_total: float = Field(..., gt=0)
    p_y: float = 0.0
    m0: float = Field(1.0, gt=0)
    barrier: BarrierProfile
    x_start: float
    x_end: float
    step: float = Field(1e-3, gt=0)
    angles: int = Field(0, ge=0)
    seed: int = 0

    @model_validator(mode="after")
    def validate_span(self) -> "TunnelConfig":
        if self.x_end <= self.x_start:
            raise ValueError("x_end must exceed x_start")
        return self
