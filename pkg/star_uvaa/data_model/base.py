"""Base geometric data models."""

import math
from typing import Sequence

import numpy as np
from pydantic import BaseModel, field_validator


class Position3(BaseModel):
    """A point in the simulator's Cartesian frame, in meters"""

    x: float
    y: float
    z: float = 0.0

    @field_validator("x", "y", "z")
    @classmethod
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("coordinates must be finite")
        return value

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "Position3":
        if len(values) == 2:
            return cls(x=float(values[0]), y=float(values[1]), z=0.0)
        x, y, z = (float(v) for v in values)
        return cls(x=x, y=y, z=z)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)
