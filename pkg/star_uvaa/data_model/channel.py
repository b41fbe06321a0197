"""Channel realization data models."""

from typing import Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator


class AngleSet(BaseModel):
    """Direction as polar angle from +z (theta) and azimuth (phi), radians"""

    theta: float = Field(ge=0.0, le=np.pi)
    phi: float = Field(ge=-np.pi, le=np.pi)


class ChannelRealization(BaseModel):
    """All link coefficients of one time slot.

    Side K (same side as the UAVs) is served through reflection, side J through
    transmission. Vectors have one entry per STAR-RIS element.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True)

    h_ms: np.ndarray
    h_sk: np.ndarray
    h_sj: np.ndarray
    h_mk: complex
    h_mj: complex
    angle_ris: Optional[AngleSet] = None
    angle_k: Optional[AngleSet] = None
    angle_j: Optional[AngleSet] = None
    direct_fading: tuple[complex, complex] = (0j, 0j)
    ris_fading_k: Optional[np.ndarray] = None
    ris_fading_j: Optional[np.ndarray] = None

    @field_validator("h_ms", "h_sk", "h_sj", mode="before")
    @classmethod
    def _complex_vector(cls, value) -> np.ndarray:
        array = np.array(value, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(array)):
            raise ValueError("channel coefficients must be finite")
        return array

    @property
    def n_elements(self) -> int:
        return int(self.h_ms.size)

    @classmethod
    def zeros(cls, n_elements: int) -> "ChannelRealization":
        return cls(
            h_ms=np.zeros(n_elements, dtype=complex),
            h_sk=np.zeros(n_elements, dtype=complex),
            h_sj=np.zeros(n_elements, dtype=complex),
            h_mk=0j,
            h_mj=0j,
        )

    def to_record(self) -> dict:
        """JSON-friendly dump with complex values split into [re, im] pairs."""

        def pairs(values) -> list[list[float]]:
            return [[float(v.real), float(v.imag)] for v in np.atleast_1d(values)]

        return {
            "h_ms": pairs(self.h_ms),
            "h_sk": pairs(self.h_sk),
            "h_sj": pairs(self.h_sj),
            "h_mk": pairs(self.h_mk)[0],
            "h_mj": pairs(self.h_mj)[0],
            "angle_ris": self.angle_ris.model_dump() if self.angle_ris else None,
            "angle_k": self.angle_k.model_dump() if self.angle_k else None,
            "angle_j": self.angle_j.model_dump() if self.angle_j else None,
        }
