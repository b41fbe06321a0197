"""STAR-RIS coefficient state and annealing data models."""

import itertools
import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

TWO_PI = 2.0 * math.pi


def wrap_phase(phase):
    """Wrap phases into [0, 2π)."""
    wrapped = np.mod(phase, TWO_PI)
    # np.mod can return exactly 2π for tiny negative inputs
    return np.where(wrapped >= TWO_PI, 0.0, wrapped)


class StarRisState(BaseModel):
    """Energy-splitting coefficients of every STAR-RIS element.

    Only the reflection share a_R is stored; the transmission share is
    1 - a_R so the two always sum to one.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    amplitude_r: np.ndarray
    phase_r: np.ndarray
    phase_t: np.ndarray

    @field_validator("amplitude_r", "phase_r", "phase_t", mode="before")
    @classmethod
    def _as_float_vector(cls, value) -> np.ndarray:
        array = np.array(value, dtype=float).reshape(-1)
        if not np.all(np.isfinite(array)):
            raise ValueError("coefficients must be finite")
        return array

    @model_validator(mode="after")
    def _consistent(self) -> "StarRisState":
        n = self.amplitude_r.size
        if self.phase_r.size != n or self.phase_t.size != n:
            raise ValueError("amplitude and phase vectors must have equal length")
        if np.any(self.amplitude_r < 0.0) or np.any(self.amplitude_r > 1.0):
            raise ValueError("reflection amplitudes must lie in [0, 1]")
        self.phase_r = wrap_phase(self.phase_r)
        self.phase_t = wrap_phase(self.phase_t)
        return self

    @classmethod
    def initial(cls, n_elements: int, amplitude: float = 0.5) -> "StarRisState":
        return cls(
            amplitude_r=np.full(n_elements, amplitude),
            phase_r=np.zeros(n_elements),
            phase_t=np.zeros(n_elements),
        )

    @property
    def amplitude_t(self) -> np.ndarray:
        return 1.0 - self.amplitude_r

    @property
    def n_elements(self) -> int:
        return int(self.amplitude_r.size)

    def copy(self) -> "StarRisState":
        return StarRisState.model_construct(
            amplitude_r=self.amplitude_r.copy(),
            phase_r=self.phase_r.copy(),
            phase_t=self.phase_t.copy(),
        )


class AnnealSchedule(BaseModel):
    """Temperature schedule for one annealing pass"""

    t_init: float = Field(default=1.0, gt=0.0)
    cooling: float = Field(default=0.95, gt=0.0, lt=1.0)
    t_min: float = Field(default=0.1, gt=0.0)

    @model_validator(mode="after")
    def _init_above_floor(self) -> "AnnealSchedule":
        if self.t_init < self.t_min:
            raise ValueError("t_init must be at least t_min")
        return self


class CandidateSet(BaseModel):
    """Per-element candidate values; their Cartesian product is searched"""

    amplitudes: list[float]
    phases_r: list[float]
    phases_t: list[float]

    @field_validator("amplitudes")
    @classmethod
    def _amplitudes_in_range(cls, value: list[float]) -> list[float]:
        if not value:
            raise ValueError("candidate lists must be nonempty")
        if any(a < 0.0 or a > 1.0 for a in value):
            raise ValueError("amplitude candidates must lie in [0, 1]")
        return value

    @field_validator("phases_r", "phases_t")
    @classmethod
    def _phases_wrapped(cls, value: list[float]) -> list[float]:
        if not value:
            raise ValueError("candidate lists must be nonempty")
        return [float(p) for p in wrap_phase(np.asarray(value, dtype=float))]

    @property
    def size(self) -> int:
        return len(self.amplitudes) * len(self.phases_r) * len(self.phases_t)

    def combinations(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Flattened (amplitude, reflection phase, transmission phase) columns in product order."""
        rows = np.array(
            list(itertools.product(self.amplitudes, self.phases_r, self.phases_t)),
            dtype=float,
        )
        return rows[:, 0], rows[:, 1], rows[:, 2]
