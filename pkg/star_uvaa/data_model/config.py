"""Scenario configuration models, one per TOML section."""

import math
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .base import Position3
from .ris import AnnealSchedule

SPEED_OF_LIGHT = 299_792_458.0


class _Section(BaseModel):
    model_config = ConfigDict(extra="forbid")


class RegionConfig(_Section):
    """UAV flight box, swarm size and kinematic bounds"""

    l_min: float = 1450.0
    l_max: float = 1550.0
    h_min: float = 60.0
    h_max: float = 90.0
    d_min: float = Field(default=0.5, ge=0.0)
    n_uavs: int = Field(default=8, ge=1)
    v_min: float = Field(default=0.0, ge=0.0)
    v_max: float = 20.0
    omega_min: float = -5.0
    omega_max: float = 5.0

    @model_validator(mode="after")
    def _ordered_bounds(self) -> "RegionConfig":
        if not self.l_min < self.l_max:
            raise ValueError("l_min must be smaller than l_max")
        if not self.h_min < self.h_max:
            raise ValueError("h_min must be smaller than h_max")
        if not self.v_min <= self.v_max:
            raise ValueError("v_min must not exceed v_max")
        if not self.omega_min <= self.omega_max:
            raise ValueError("omega_min must not exceed omega_max")
        return self


class RisConfig(_Section):
    """STAR-RIS placement and element grid"""

    position: list[float] = Field(default_factory=lambda: [1500.0, 1500.0, 20.0])
    rows: int = Field(default=6, ge=1)
    cols: int = Field(default=10, ge=1)
    n_elements: Optional[int] = None
    spacing_r: Optional[float] = Field(default=None, gt=0.0)
    spacing_c: Optional[float] = Field(default=None, gt=0.0)
    rician_k_db: float = 3.0

    @field_validator("position")
    @classmethod
    def _three_coordinates(cls, value: list[float]) -> list[float]:
        if len(value) != 3:
            raise ValueError("position needs exactly three coordinates")
        return value

    @model_validator(mode="after")
    def _grid_matches_count(self) -> "RisConfig":
        if self.n_elements is not None and self.n_elements != self.rows * self.cols:
            raise ValueError(
                f"n_elements ({self.n_elements}) must equal rows*cols "
                f"({self.rows}*{self.cols})"
            )
        return self


class RadioConfig(_Section):
    """Carrier, power budget, path loss and pattern integration settings"""

    carrier_hz: float = 2.4e9
    bandwidth_hz: float = 2e6
    tx_power_w: float = 0.1
    noise_psd_dbm_hz: float = -155.0
    noise_power_w: Optional[float] = None
    path_loss_ref: float = 1e-3
    alpha_direct: float = 3.6
    alpha_ris: float = 2.7
    array_efficiency: float = Field(default=1.0, ge=0.0, le=1.0)
    element_pattern: Literal["isotropic", "dipole"] = "isotropic"
    quad_theta: int = 90
    quad_phi: int = 180

    @field_validator("tx_power_w")
    @classmethod
    def _tx_power_positive(cls, value: float) -> float:
        if value <= 0:
            raise ValueError("P_t must be positive")
        return value

    @field_validator("carrier_hz", "bandwidth_hz", "path_loss_ref", "noise_power_w")
    @classmethod
    def _strictly_positive(cls, value: Optional[float]) -> Optional[float]:
        if value is not None and value <= 0:
            raise ValueError("must be positive")
        return value

    @field_validator("quad_theta", "quad_phi")
    @classmethod
    def _fine_enough_grid(cls, value: int) -> int:
        if value < 8:
            raise ValueError("quadrature grid needs at least 8 points per axis")
        return value


class MobilityConfig(_Section):
    """Ground users, Gauss-Markov parameters and slot timing"""

    n_users_k: int = Field(default=1, ge=1)
    n_users_j: int = Field(default=1, ge=1)
    rect_k: list[float] = Field(default_factory=lambda: [1480.0, 1530.0, 1400.0, 1490.0])
    rect_j: list[float] = Field(default_factory=lambda: [1480.0, 1530.0, 1510.0, 1600.0])
    memory: float = Field(default=0.8, ge=0.0, le=1.0)
    mean_speed: float = Field(default=1.0, ge=0.0)
    speed_std: float = Field(default=0.3, ge=0.0)
    heading_std: float = Field(default=0.1, ge=0.0)
    slot_duration: float = Field(default=1.0, gt=0.0)
    n_slots: int = Field(default=100, ge=1)

    @field_validator("rect_k", "rect_j")
    @classmethod
    def _valid_rectangle(cls, value: list[float]) -> list[float]:
        if len(value) != 4:
            raise ValueError("rectangle is [x_min, x_max, y_min, y_max]")
        if not (value[0] < value[1] and value[2] < value[3]):
            raise ValueError("rectangle bounds must be increasing")
        return value


class EnergyConfig(_Section):
    """Rotary-wing aerodynamic parameters"""

    mass_kg: float = Field(default=2.0, gt=0.0)
    gravity: float = Field(default=9.8, gt=0.0)
    v_tip: float = Field(default=120.0, gt=0.0)
    v0: float = Field(default=4.03, gt=0.0)
    rho_air: float = Field(default=1.225, gt=0.0)
    disc_area: float = Field(default=0.503, gt=0.0)
    d0: float = Field(default=0.6, gt=0.0)
    solidity: float = Field(default=0.05, gt=0.0)
    profile_drag_coeff: float = Field(default=0.012, gt=0.0)
    induced_correction: float = Field(default=0.1, ge=0.0)
    p_blade: Optional[float] = Field(default=None, gt=0.0)
    p_induced: Optional[float] = Field(default=None, gt=0.0)

    @model_validator(mode="after")
    def _tip_faster_than_induced(self) -> "EnergyConfig":
        if not self.v_tip > self.v0:
            raise ValueError("v_tip must exceed v0")
        return self


class SaConfig(_Section):
    """Annealing schedule and candidate grid of the STAR-RIS controller"""

    t_init: float = 1.0
    cooling: float = 0.95
    t_min: float = 0.1
    delta_amp: float = Field(default=0.25, ge=0.0)
    delta_phase: float = Field(default=math.pi / 4, ge=0.0)
    n_amp: int = Field(default=3, ge=1)
    n_phase: int = Field(default=4, ge=1)
    metric_scaling: Literal["minmax", "none"] = "minmax"

    @model_validator(mode="after")
    def _valid_schedule(self) -> "SaConfig":
        self.schedule()
        return self

    def schedule(self) -> AnnealSchedule:
        return AnnealSchedule(t_init=self.t_init, cooling=self.cooling, t_min=self.t_min)


class RewardParams(_Section):
    """Objective weights, guidance weights and penalty base of the per-agent reward"""

    lambda_rate: float = Field(default=1.0, ge=0.0)
    lambda_energy: float = Field(default=0.01, ge=0.0)
    zeta_direction: float = Field(default=1.0, ge=0.0)
    zeta_distance: float = Field(default=0.01, ge=0.0)
    epsilon: float = Field(default=0.2, gt=0.0, le=1.0)
    t_max: Optional[int] = Field(default=None, ge=1)
    reference_point: Optional[list[float]] = None
    rate_floor_k: float = Field(default=1e5, ge=0.0)
    rate_floor_j: float = Field(default=1e5, ge=0.0)
    rate_unit: float = Field(default=1e6, gt=0.0)

    @field_validator("reference_point")
    @classmethod
    def _three_coordinates(cls, value: Optional[list[float]]) -> Optional[list[float]]:
        if value is not None and len(value) != 3:
            raise ValueError("reference_point needs exactly three coordinates")
        return value


class TrainConfig(_Section):
    """Learning hyperparameters and ablation switches"""

    n_episodes: int = Field(default=3000, ge=0)
    updates_per_slot: int = Field(default=1, ge=0)
    batch_size: int = Field(default=256, ge=1)
    gamma: float = Field(default=0.9, ge=0.0, lt=1.0)
    tau: float = Field(default=0.005, gt=0.0, le=1.0)
    alpha_entropy: float = Field(default=0.01, ge=0.0)
    learning_rate: float = Field(default=7e-4, gt=0.0)
    # multiplies r_m in the soft Bellman target only
    reward_scale: float = Field(default=1.0, gt=0.0)
    buffer_capacity: int = Field(default=100_000, ge=1)
    sigma_b: float = Field(default=1.0, ge=0.0)
    v_me: Optional[float] = Field(default=None, ge=0.0)
    use_attention: bool = True
    use_velocity_guidance: bool = True
    twin_critic: bool = False
    policy_hidden: list[int] = Field(default_factory=lambda: [128, 128])
    critic_embed: int = Field(default=128, ge=1)
    critic_hidden: list[int] = Field(default_factory=lambda: [128, 128])
    key_dim: int = Field(default=64, ge=1)
    checkpoint_every: int = Field(default=100, ge=0)
    warmup_transitions: Optional[int] = Field(default=None, ge=0)

    @model_validator(mode="after")
    def _batch_fits_buffer(self) -> "TrainConfig":
        if self.batch_size > self.buffer_capacity:
            raise ValueError("batch_size must not exceed buffer_capacity")
        return self

    @property
    def warmup(self) -> int:
        return self.batch_size if self.warmup_transitions is None else self.warmup_transitions


class ScenarioConfig(_Section):
    """Complete, validated simulator configuration"""

    seed: int = Field(default=0, ge=0, lt=2**64)
    region: RegionConfig = Field(default_factory=RegionConfig)
    ris: RisConfig = Field(default_factory=RisConfig)
    radio: RadioConfig = Field(default_factory=RadioConfig)
    mobility: MobilityConfig = Field(default_factory=MobilityConfig)
    energy: EnergyConfig = Field(default_factory=EnergyConfig)
    sa: SaConfig = Field(default_factory=SaConfig)
    reward: RewardParams = Field(default_factory=RewardParams)
    train: TrainConfig = Field(default_factory=TrainConfig)

    @property
    def wavelength(self) -> float:
        return SPEED_OF_LIGHT / self.radio.carrier_hz

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength

    @property
    def n_elements(self) -> int:
        return self.ris.rows * self.ris.cols

    @property
    def spacing_r(self) -> float:
        return self.ris.spacing_r if self.ris.spacing_r is not None else self.wavelength / 2

    @property
    def spacing_c(self) -> float:
        return self.ris.spacing_c if self.ris.spacing_c is not None else self.wavelength / 2

    @property
    def ris_position(self) -> Position3:
        return Position3.from_array(self.ris.position)

    @property
    def rician_beta(self) -> float:
        return 10.0 ** (self.ris.rician_k_db / 10.0)

    @property
    def noise_power_w(self) -> float:
        if self.radio.noise_power_w is not None:
            return self.radio.noise_power_w
        psd_w_hz = 10.0 ** ((self.radio.noise_psd_dbm_hz - 30.0) / 10.0)
        return psd_w_hz * self.radio.bandwidth_hz

    @property
    def t_max(self) -> int:
        return self.reward.t_max if self.reward.t_max is not None else self.mobility.n_slots

    @property
    def reference_point(self) -> Position3:
        if self.reward.reference_point is not None:
            return Position3.from_array(self.reward.reference_point)
        r = self.region
        return Position3(
            x=(r.l_min + r.l_max) / 2, y=(r.l_min + r.l_max) / 2, z=(r.h_min + r.h_max) / 2
        )

    @property
    def n_users(self) -> int:
        return self.mobility.n_users_k + self.mobility.n_users_j

    @property
    def observation_dim(self) -> int:
        return 3 * self.region.n_uavs + 2 * self.n_users
