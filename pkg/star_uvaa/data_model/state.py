"""UAV swarm and ground-user state models."""

from enum import Enum

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .base import Position3


class Side(str, Enum):
    """Which half-space of the STAR-RIS a user occupies"""

    SAME = "K"
    OPPOSITE = "J"


class UavState(BaseModel):
    """Kinematic state and excitation of one UAV"""

    position: Position3
    speed: float = Field(default=0.0, ge=0.0, description="Horizontal speed, m/s")
    heading: float = 0.0
    vertical_speed: float = 0.0
    excitation: float = Field(default=1.0, ge=0.0, le=1.0)
    prev_mean_speed: float = Field(default=0.0, ge=0.0)


class SwarmState(BaseModel):
    """All UAVs of the virtual array as column arrays in a stable order"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    positions: np.ndarray
    speeds: np.ndarray
    headings: np.ndarray
    vertical_speeds: np.ndarray
    excitations: np.ndarray
    prev_mean_speeds: np.ndarray

    @field_validator(
        "positions", "speeds", "headings", "vertical_speeds", "excitations",
        "prev_mean_speeds", mode="before",
    )
    @classmethod
    def _as_float_array(cls, value) -> np.ndarray:
        return np.array(value, dtype=float)

    @model_validator(mode="after")
    def _consistent_shapes(self) -> "SwarmState":
        if self.positions.ndim != 2 or self.positions.shape[1] != 3:
            raise ValueError("positions must have shape (n_uavs, 3)")
        n = self.positions.shape[0]
        if n == 0:
            raise ValueError("swarm must contain at least one UAV")
        for name in ("speeds", "headings", "vertical_speeds", "excitations", "prev_mean_speeds"):
            if getattr(self, name).shape != (n,):
                raise ValueError(f"{name} must have shape ({n},)")
        return self

    @classmethod
    def from_positions(cls, positions: np.ndarray) -> "SwarmState":
        n = len(positions)
        return cls(
            positions=positions,
            speeds=np.zeros(n),
            headings=np.zeros(n),
            vertical_speeds=np.zeros(n),
            excitations=np.ones(n),
            prev_mean_speeds=np.zeros(n),
        )

    @classmethod
    def from_uavs(cls, uavs: list[UavState]) -> "SwarmState":
        return cls(
            positions=[u.position.as_array() for u in uavs],
            speeds=[u.speed for u in uavs],
            headings=[u.heading for u in uavs],
            vertical_speeds=[u.vertical_speed for u in uavs],
            excitations=[u.excitation for u in uavs],
            prev_mean_speeds=[u.prev_mean_speed for u in uavs],
        )

    @property
    def uavs(self) -> list[UavState]:
        return [
            UavState(
                position=Position3.from_array(self.positions[m]),
                speed=float(self.speeds[m]),
                heading=float(self.headings[m]),
                vertical_speed=float(self.vertical_speeds[m]),
                excitation=float(self.excitations[m]),
                prev_mean_speed=float(self.prev_mean_speeds[m]),
            )
            for m in range(self.n_uavs)
        ]

    @property
    def n_uavs(self) -> int:
        return int(self.positions.shape[0])

    def centroid(self) -> np.ndarray:
        return self.positions.mean(axis=0)

    def pairwise_distances(self) -> np.ndarray:
        diff = self.positions[:, None, :] - self.positions[None, :, :]
        return np.linalg.norm(diff, axis=-1)

    def copy(self) -> "SwarmState":
        return SwarmState.model_construct(
            **{name: getattr(self, name).copy() for name in SwarmState.model_fields}
        )


class UserState(BaseModel):
    """Ground user on one side of the STAR-RIS"""

    position: Position3
    velocity: tuple[float, float] = (0.0, 0.0)
    side: Side
    mean_heading: float = 0.0

    @field_validator("position")
    @classmethod
    def _on_ground(cls, value: Position3) -> Position3:
        if value.z != 0.0:
            raise ValueError("ground users must have z = 0")
        return value
