"""The multi-UAV decision process: observations, kinematics, constraints and rewards."""

import math
from typing import Callable, Optional

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict

from . import channel as ch
from .data_model import (
    AeroParams,
    ChannelRealization,
    ConstraintFlags,
    RewardParams,
    ScenarioConfig,
    Side,
    SlotMetrics,
    StarRisState,
    StepOutcome,
    SwarmState,
    UavAction,
    UserState,
)
from .energy import flight_energy
from .rng import RngStream
from .scenario import gmrmm_step, in_region, init_deployment
from .star_ris import StarRisAgent

RisController = Callable[[ChannelRealization, StarRisState, RngStream], StarRisState]
ACTION_DIM = 4
BOUND_TOLERANCE = 1e-9


class ActionSpace:
    """Physical bounds of [excitation, speed, heading, vertical speed]."""

    def __init__(self, cfg: ScenarioConfig):
        r = cfg.region
        self.low = np.array([0.0, r.v_min, -math.pi, r.omega_min])
        self.high = np.array([1.0, r.v_max, math.pi, r.omega_max])

    @property
    def dim(self) -> int:
        return ACTION_DIM

    def to_physical(self, normalized: np.ndarray) -> np.ndarray:
        normalized = np.clip(np.asarray(normalized, dtype=float), -1.0, 1.0)
        return self.low + (normalized + 1.0) * 0.5 * (self.high - self.low)

    def to_normalized(self, physical: np.ndarray) -> np.ndarray:
        span = np.where(self.high > self.low, self.high - self.low, 1.0)
        return 2.0 * (np.asarray(physical, dtype=float) - self.low) / span - 1.0

    def log_scale(self) -> float:
        """Log-determinant of the map from [-1, 1]^4 to the physical box."""
        half_span = np.maximum((self.high - self.low) / 2.0, 1e-12)
        return float(np.sum(np.log(half_span)))

    def sample(self, generator: np.random.Generator) -> np.ndarray:
        return generator.uniform(self.low, self.high)

    def contains(self, action: np.ndarray) -> bool:
        action = np.asarray(action, dtype=float)
        return bool(
            np.all(action >= self.low - BOUND_TOLERANCE)
            and np.all(action <= self.high + BOUND_TOLERANCE)
        )


class SwarmGeometry(BaseModel):
    """Positions and last displacements needed by the guidance terms"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    positions: np.ndarray
    displacements: np.ndarray
    ris_position: np.ndarray
    reference_point: np.ndarray


def penalty_weight(t: int, t_max: int, epsilon: float) -> float:
    """ε + (1 - ε)·min(t / t_max, 1)."""
    if t_max <= 0:
        raise ValueError("t_max must be positive")
    if t < 0:
        raise ValueError("slot index must be non-negative")
    return epsilon + (1.0 - epsilon) * min(t / t_max, 1.0)


def objective(rate: float, energy: float, lambda_rate: float, lambda_energy: float) -> float:
    return lambda_rate * rate - lambda_energy * energy


def cosine_similarity(a: np.ndarray, b: np.ndarray) -> float:
    norm = float(np.linalg.norm(a) * np.linalg.norm(b))
    if norm == 0.0:
        return 0.0
    return float(np.dot(a, b) / norm)


def constraint_check(
    swarm: SwarmState, cfg: ScenarioConfig, rate_k: float, rate_j: float
) -> ConstraintFlags:
    """Box membership, pairwise separation and per-side rate floors."""
    inside = in_region(swarm.positions, cfg)
    distances = swarm.pairwise_distances()
    collisions = distances < cfg.region.d_min
    np.fill_diagonal(collisions, False)
    return ConstraintFlags(
        out_of_bounds=[bool(not ok) for ok in inside],
        collisions=collisions.tolist(),
        rate_floor_k_met=rate_k >= cfg.reward.rate_floor_k,
        rate_floor_j_met=rate_j >= cfg.reward.rate_floor_j,
    )


def reward(
    agent: int,
    metrics: SlotMetrics,
    geometry: SwarmGeometry,
    params: RewardParams,
    t: int,
    t_max: int,
) -> float:
    """
    Per-agent reward of one slot.

    Feasible agents get the shared rate minus their own energy plus the
    direction and distance guidance terms; agents outside the box or too close
    to a neighbour get the time-growing penalty instead.
    """
    flags = metrics.flags
    if not flags.feasible(agent):
        weight = penalty_weight(t, t_max, params.epsilon)
        return -(weight * int(flags.out_of_bounds[agent]) + weight * flags.collided(agent))

    position = geometry.positions[agent]
    towards_ris = geometry.ris_position - position
    alignment = cosine_similarity(towards_ris, geometry.displacements[agent])
    distance = float(np.linalg.norm(geometry.reference_point - position))
    own = objective(
        metrics.rate_bps / params.rate_unit,
        metrics.energies_j[agent],
        params.lambda_rate,
        params.lambda_energy,
    )
    return own + params.zeta_direction * alignment - params.zeta_distance * distance


def normalize_observation(observation: np.ndarray, cfg: ScenarioConfig) -> np.ndarray:
    """Map box coordinates to roughly [-1, 1] around the box centre."""
    r = cfg.region
    center_xy = (r.l_min + r.l_max) / 2.0
    half_xy = (r.l_max - r.l_min) / 2.0
    center_z = (r.h_min + r.h_max) / 2.0
    half_z = (r.h_max - r.h_min) / 2.0
    n_uavs = r.n_uavs

    out = np.asarray(observation, dtype=float).copy()
    uav = out[: 3 * n_uavs].reshape(n_uavs, 3)
    uav[:, :2] = (uav[:, :2] - center_xy) / half_xy
    uav[:, 2] = (uav[:, 2] - center_z) / half_z
    out[3 * n_uavs :] = (out[3 * n_uavs :] - center_xy) / half_xy
    return out


class UvaaEnv:
    """
    Environment for the UAV virtual antenna array serving users on both sides
    of a STAR-RIS.

    Observation layout: (x, y, z) of every UAV in swarm order, then (x, y) of
    the side-K users, then (x, y) of the side-J users.
    """

    def __init__(
        self,
        cfg: ScenarioConfig,
        seed: Optional[int] = None,
        ris_controller: Optional[RisController] = None,
    ):
        self.cfg = cfg
        self.seed = cfg.seed if seed is None else seed
        self.action_space = ActionSpace(cfg)
        self.aero = AeroParams.from_config(cfg.energy)
        self.ris_controller = ris_controller or StarRisAgent(cfg.sa)
        self.rng = RngStream(self.seed)
        self.swarm: Optional[SwarmState] = None
        self.users: list[UserState] = []
        self.ris_state = StarRisState.initial(cfg.n_elements)
        self.last_channel: Optional[ChannelRealization] = None
        self.slot = 0

    @property
    def n_agents(self) -> int:
        return self.cfg.region.n_uavs

    @property
    def observation_dim(self) -> int:
        return self.cfg.observation_dim

    @property
    def done(self) -> bool:
        return self.slot >= self.cfg.mobility.n_slots

    def reset(self, seed: Optional[int] = None) -> np.ndarray:
        """Start a new episode; a new seed re-creates every random substream."""
        if seed is not None:
            self.seed = seed
            self.rng = RngStream(seed)
        self.swarm, self.users = init_deployment(self.cfg, self.rng)
        self.ris_state = StarRisState.initial(self.cfg.n_elements)
        self.last_channel = None
        self.slot = 0
        return self.observation()

    def observation(self) -> np.ndarray:
        users_k = [u for u in self.users if u.side is Side.SAME]
        users_j = [u for u in self.users if u.side is Side.OPPOSITE]
        user_xy = [(u.position.x, u.position.y) for u in users_k + users_j]
        return np.concatenate(
            [self.swarm.positions.reshape(-1), np.asarray(user_xy, dtype=float).reshape(-1)]
        )

    def _check_actions(self, actions: list[UavAction]) -> np.ndarray:
        if len(actions) != self.n_agents:
            raise ValueError(f"expected {self.n_agents} actions, got {len(actions)}")
        matrix = np.array([a.as_array() for a in actions])
        for m, row in enumerate(matrix):
            if not self.action_space.contains(row):
                raise ValueError(f"action of UAV {m} is outside the action bounds: {row}")
        return matrix

    def step(
        self,
        actions: list[UavAction],
        ris_controller: Optional[RisController] = None,
    ) -> StepOutcome:
        """
        Advance one slot.

        Order: UAV kinematics, user mobility, channel draw, STAR-RIS update,
        gains/rate/energy, rewards, slot counter.
        """
        if self.swarm is None:
            raise RuntimeError("reset() must be called before step()")
        if self.done:
            raise RuntimeError("episode finished; call reset()")
        matrix = self._check_actions(actions)
        cfg = self.cfg
        dt = cfg.mobility.slot_duration
        swarm = self.swarm

        # (1) kinematics
        previous = swarm.positions.copy()
        excitation, speed, heading, vertical = matrix.T
        swarm.positions[:, 0] += speed * np.cos(heading) * dt
        swarm.positions[:, 1] += speed * np.sin(heading) * dt
        swarm.positions[:, 2] += vertical * dt
        swarm.excitations[:] = excitation
        swarm.speeds[:] = speed
        swarm.headings[:] = heading
        swarm.vertical_speeds[:] = vertical

        # (2) users
        self.users = [gmrmm_step(user, cfg, self.rng) for user in self.users]

        # (3) channel
        chan = ch.draw_channel(swarm, self.users, cfg, self.rng)
        self.last_channel = chan

        # (4) STAR-RIS
        controller = ris_controller or self.ris_controller
        self.ris_state = controller(chan, self.ris_state, self.rng)

        # (5) gains, rate, energy
        pattern = ch.pattern_integral(swarm, cfg)
        if pattern > 0.0:
            gain_k = ch.composite_gain(chan, self.ris_state, swarm, Side.SAME, cfg, pattern)
            gain_j = ch.composite_gain(chan, self.ris_state, swarm, Side.OPPOSITE, cfg, pattern)
        else:
            # every UAV silent: nothing is radiated
            gain_k = gain_j = 0.0
        rate_k = ch.side_rate(gain_k, cfg)
        rate_j = ch.side_rate(gain_j, cfg)
        rate = rate_k + rate_j

        energies = [
            flight_energy(
                speed[m], speed[m], swarm.prev_mean_speeds[m],
                swarm.positions[m, 2], previous[m, 2], dt, self.aero,
            )
            for m in range(self.n_agents)
        ]
        swarm.prev_mean_speeds[:] = speed
        total_energy = float(sum(energies))

        flags = constraint_check(swarm, cfg, rate_k, rate_j)
        if not (flags.rate_floor_k_met and flags.rate_floor_j_met):
            logger.debug(
                f"Slot {self.slot}: rate floor missed (K {rate_k:.3g} bit/s, J {rate_j:.3g} bit/s)"
            )
        metrics = SlotMetrics(
            rate_bps=rate,
            gain_k=gain_k,
            gain_j=gain_j,
            energies_j=energies,
            total_energy_j=total_energy,
            objective=objective(
                rate / cfg.reward.rate_unit, total_energy,
                cfg.reward.lambda_rate, cfg.reward.lambda_energy,
            ),
            flags=flags,
        )

        # (6) rewards
        geometry = SwarmGeometry(
            positions=swarm.positions.copy(),
            displacements=swarm.positions - previous,
            ris_position=cfg.ris_position.as_array(),
            reference_point=cfg.reference_point.as_array(),
        )
        rewards = [
            reward(m, metrics, geometry, cfg.reward, self.slot, cfg.t_max)
            for m in range(self.n_agents)
        ]

        # (7) slot counter
        self.slot += 1
        return StepOutcome(
            observation=self.observation(),
            rewards=rewards,
            metrics=metrics,
            done=self.done,
        )
