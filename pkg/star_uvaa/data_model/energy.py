"""Aerodynamic parameter model of the rotary-wing propulsion power curve."""

import math

from pydantic import BaseModel, Field, model_validator

from .config import EnergyConfig


class AeroParams(BaseModel):
    """Resolved propulsion-power coefficients (all SI units)"""

    p_blade: float = Field(gt=0.0)
    p_induced: float = Field(gt=0.0)
    v_tip: float = Field(gt=0.0)
    v0: float = Field(gt=0.0)
    d0: float = Field(gt=0.0)
    solidity: float = Field(gt=0.0)
    rho_air: float = Field(gt=0.0)
    disc_area: float = Field(gt=0.0)
    mass_kg: float = Field(gt=0.0)
    gravity: float = Field(gt=0.0)

    @model_validator(mode="after")
    def _tip_faster_than_induced(self) -> "AeroParams":
        if not self.v_tip > self.v0:
            raise ValueError("v_tip must exceed v0")
        return self

    @classmethod
    def from_config(cls, cfg: EnergyConfig) -> "AeroParams":
        """Derive hover powers from the rotor parameters unless overridden."""
        weight = cfg.mass_kg * cfg.gravity
        p_blade = cfg.p_blade
        if p_blade is None:
            p_blade = (
                cfg.profile_drag_coeff / 8.0 * cfg.rho_air * cfg.solidity
                * cfg.disc_area * cfg.v_tip**3
            )
        p_induced = cfg.p_induced
        if p_induced is None:
            p_induced = (1.0 + cfg.induced_correction) * weight**1.5 / math.sqrt(
                2.0 * cfg.rho_air * cfg.disc_area
            )
        return cls(
            p_blade=p_blade,
            p_induced=p_induced,
            v_tip=cfg.v_tip,
            v0=cfg.v0,
            d0=cfg.d0,
            solidity=cfg.solidity,
            rho_air=cfg.rho_air,
            disc_area=cfg.disc_area,
            mass_kg=cfg.mass_kg,
            gravity=cfg.gravity,
        )
