"""Per-slot and per-episode outcome models."""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class UavAction(BaseModel):
    """Physical action of one UAV for one slot"""

    excitation: float = Field(ge=0.0, le=1.0)
    speed: float = Field(ge=0.0)
    heading: float = Field(ge=-np.pi, le=np.pi)
    vertical_speed: float

    @classmethod
    def from_array(cls, values) -> "UavAction":
        excitation, speed, heading, vertical_speed = (float(v) for v in values)
        return cls(
            excitation=excitation,
            speed=speed,
            heading=heading,
            vertical_speed=vertical_speed,
        )

    def as_array(self) -> np.ndarray:
        return np.array([self.excitation, self.speed, self.heading, self.vertical_speed])


class ConstraintFlags(BaseModel):
    """Feasibility indicators of one slot"""

    out_of_bounds: list[bool] = Field(default_factory=list)
    collisions: list[list[bool]] = Field(default_factory=list)
    rate_floor_k_met: bool = True
    rate_floor_j_met: bool = True

    def collided(self, agent: int) -> int:
        """Number of neighbours closer than the minimum separation."""
        return int(sum(self.collisions[agent]))

    def feasible(self, agent: int) -> bool:
        return not self.out_of_bounds[agent] and self.collided(agent) == 0

    @property
    def n_out_of_bounds(self) -> int:
        return int(sum(self.out_of_bounds))

    @property
    def n_collision_pairs(self) -> int:
        n = len(self.collisions)
        return sum(
            1 for m in range(n) for k in range(m + 1, n) if self.collisions[m][k]
        )


class SlotMetrics(BaseModel):
    """Physical-layer and energy results of one slot"""

    rate_bps: float = Field(ge=0.0)
    gain_k: float = Field(ge=0.0)
    gain_j: float = Field(ge=0.0)
    energies_j: list[float] = Field(default_factory=list)
    total_energy_j: float = Field(ge=0.0)
    objective: float
    flags: ConstraintFlags


class StepOutcome(BaseModel):
    """Result of one environment step"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    observation: np.ndarray
    rewards: list[float]
    metrics: SlotMetrics
    done: bool = False

    @field_validator("rewards")
    @classmethod
    def _finite_rewards(cls, value: list[float]) -> list[float]:
        if not all(np.isfinite(value)):
            raise ValueError("rewards must be finite")
        return value


class Transition(BaseModel):
    """One MDP tuple as stored for off-policy learning"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    observation: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_observation: np.ndarray


class EpisodeRecord(BaseModel):
    """One row of the per-episode metrics table"""

    episode: int
    mean_rate_bps: float
    total_energy_j: float
    mean_reward: float
    boundary_violations: int
    collision_violations: int
    rate_floor_misses_k: int
    rate_floor_misses_j: int
    mean_speed: float


class RunManifest(BaseModel):
    """Provenance of one CLI run"""

    command: str
    seed: int
    config: dict
    config_hash: str
    build: str
    started_at: str
    finished_at: Optional[str] = None
    out_dir: str
    files: list[str] = Field(default_factory=list)
