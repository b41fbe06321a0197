"""Coordinator that runs the joint UAV / STAR-RIS training and evaluation workflow."""

from typing import Callable, Literal, Optional

import numpy as np
from loguru import logger

from ..data_model import (
    ChannelRealization,
    EpisodeRecord,
    ScenarioConfig,
    StepOutcome,
    Transition,
    UavAction,
)
from ..energy import energy_optimal_speed
from ..env import UvaaEnv, normalize_observation
from ..errors import NumericalError
from ..replay import ReplayBuffer
from ..star_ris import StarRisAgent
from .masac import CriticKind, UavAgent, update_round
from .velocity import SpeedGuidance, velocity_transition

Variant = Literal["hmcd", "masac", "sal", "random"]
SlotSink = Callable[[int, int, StepOutcome, ChannelRealization], None]


class HmcdCoordinator:
    """
    Drives the UAV agents and the STAR-RIS agent through episodes.

    Variants share everything except the UAV decision makers: ``hmcd`` uses
    attention critics (unless disabled) and velocity guidance (unless
    disabled), ``masac`` a centralized MLP critic without guidance, ``sal``
    independent critics on (s, a_m), and ``random`` uniform actions.
    """

    def __init__(
        self,
        cfg: ScenarioConfig,
        variant: Variant = "hmcd",
        env: Optional[UvaaEnv] = None,
    ):
        logger.info(f"Initializing HmcdCoordinator (variant={variant}, seed={cfg.seed})")
        self.cfg = cfg
        self.variant = variant
        self.ris_agent = StarRisAgent(cfg.sa)
        self.env = env or UvaaEnv(cfg, ris_controller=self.ris_agent)
        self.train_cfg = cfg.train
        self.generator = self.env.rng.policy
        self.v_me = (
            cfg.train.v_me
            if cfg.train.v_me is not None
            else energy_optimal_speed(self.env.aero, cfg.region.v_max)
        )
        self.use_guidance = variant in ("hmcd", "sal") and cfg.train.use_velocity_guidance
        self.agents: list[UavAgent] = []
        if variant != "random":
            kind = self._critic_kind(variant)
            logger.debug(f"Building {self.env.n_agents} UAV agents with {kind} critics")
            self.agents = [
                UavAgent(
                    m, self.env.n_agents, cfg.observation_dim, self.env.action_space,
                    cfg.train, kind, self.generator,
                )
                for m in range(self.env.n_agents)
            ]
        self.buffer = ReplayBuffer(
            cfg.train.buffer_capacity,
            cfg.observation_dim,
            self.env.n_agents,
            self.env.action_space.dim,
        )
        self.episodes_done = 0
        logger.info(f"HmcdCoordinator ready (v_me={self.v_me:.3f} m/s)")

    def _critic_kind(self, variant: Variant) -> CriticKind:
        if variant == "sal":
            return "own"
        if variant == "masac" or not self.cfg.train.use_attention:
            return "joint"
        return "attention"

    def select_actions(
        self,
        obs: np.ndarray,
        episode: int,
        n_episodes: int,
        deterministic: bool = False,
        guided: bool = True,
    ) -> tuple[list[UavAction], np.ndarray]:
        """Physical actions and their normalized form (after the velocity transition)."""
        space = self.env.action_space
        if self.variant == "random":
            physical = np.array([space.sample(self.generator) for _ in range(self.env.n_agents)])
            return [UavAction.from_array(row) for row in physical], space.to_normalized(physical)

        normalized = np.array(
            [agent.act(obs, self.generator, deterministic) for agent in self.agents]
        )
        physical = np.array([space.to_physical(row) for row in normalized])
        if guided and self.use_guidance:
            region = self.cfg.region
            for m in range(self.env.n_agents):
                physical[m, 1] = velocity_transition(
                    physical[m, 1], episode, n_episodes, self.v_me,
                    self.train_cfg.sigma_b, region.v_min, region.v_max, self.generator,
                )
            normalized = np.array([space.to_normalized(row) for row in physical])
        return [UavAction.from_array(row) for row in physical], normalized

    def run_episode(
        self,
        episode: int,
        n_episodes: int,
        learn: bool = True,
        deterministic: bool = False,
        slot_sink: Optional[SlotSink] = None,
    ) -> EpisodeRecord:
        """
        Roll out one episode.

        Args:
            episode: 1-based episode index, drives the velocity transition
            n_episodes: total planned episodes
            learn: store transitions and run update rounds
            deterministic: act with the squashed policy mean
            slot_sink: called after every slot with (episode, slot, outcome, channel)

        Returns:
            Per-episode metrics row
        """
        cfg = self.cfg
        obs = self.env.reset()
        rewards, rates, speeds = [], [], []
        total_energy = 0.0
        boundary = collisions = misses_k = misses_j = 0

        for slot in range(cfg.mobility.n_slots):
            try:
                obs_norm = normalize_observation(obs, cfg)
                actions, normalized = self.select_actions(
                    obs_norm, episode, n_episodes, deterministic, guided=learn
                )
                outcome = self.env.step(actions, ris_controller=self.ris_agent)
                if learn:
                    self.buffer.push(
                        Transition(
                            observation=obs_norm,
                            actions=normalized,
                            rewards=np.asarray(outcome.rewards),
                            next_observation=normalize_observation(outcome.observation, cfg),
                        )
                    )
                    self._learn(episode, n_episodes)
            except NumericalError as exc:
                logger.error(f"Numerical failure in episode {episode}, slot {slot}: {exc}")
                raise exc.with_context(episode, slot) from exc

            metrics = outcome.metrics
            rewards.extend(outcome.rewards)
            rates.append(metrics.rate_bps)
            speeds.extend(a.speed for a in actions)
            total_energy += metrics.total_energy_j
            boundary += metrics.flags.n_out_of_bounds
            collisions += metrics.flags.n_collision_pairs
            misses_k += int(not metrics.flags.rate_floor_k_met)
            misses_j += int(not metrics.flags.rate_floor_j_met)
            if slot_sink is not None:
                slot_sink(episode, slot, outcome, self.env.last_channel)
            obs = outcome.observation

        return EpisodeRecord(
            episode=episode,
            mean_rate_bps=float(np.mean(rates)),
            total_energy_j=total_energy,
            mean_reward=float(np.mean(rewards)),
            boundary_violations=boundary,
            collision_violations=collisions,
            rate_floor_misses_k=misses_k,
            rate_floor_misses_j=misses_j,
            mean_speed=float(np.mean(speeds)),
        )

    def guidance(self, episode: int, n_episodes: int) -> Optional[SpeedGuidance]:
        """Batch form of this episode's velocity transition, or None when unguided."""
        if not self.use_guidance:
            return None
        return SpeedGuidance(
            episode, n_episodes, self.v_me, self.train_cfg.sigma_b, self.env.action_space
        )

    def _learn(self, episode: int, n_episodes: int) -> None:
        if not self.agents:
            return
        warmup = max(self.train_cfg.warmup, 1)
        if len(self.buffer) < warmup:
            return
        guidance = self.guidance(episode, n_episodes)
        for _ in range(self.train_cfg.updates_per_slot):
            batch = self.buffer.sample(self.train_cfg.batch_size, self.generator)
            update_round(self.agents, batch, self.train_cfg, self.generator, guidance)

    def train(
        self,
        n_episodes: Optional[int] = None,
        on_episode: Optional[Callable[[EpisodeRecord], None]] = None,
        slot_sink: Optional[SlotSink] = None,
    ) -> list[EpisodeRecord]:
        """Run the training loop for ``n_episodes`` (defaults to the configured count)."""
        n_episodes = self.train_cfg.n_episodes if n_episodes is None else n_episodes
        logger.info(f"Training {self.variant} for {n_episodes} episodes")
        records = []
        for episode in range(1, n_episodes + 1):
            record = self.run_episode(episode, n_episodes, learn=True, slot_sink=slot_sink)
            self.episodes_done = episode
            records.append(record)
            logger.info(
                f"Episode {episode}/{n_episodes}: reward {record.mean_reward:.4f}, "
                f"rate {record.mean_rate_bps / 1e6:.3f} Mbit/s, energy {record.total_energy_j:.1f} J"
            )
            if on_episode is not None:
                on_episode(record)
        return records

    def evaluate(
        self,
        episodes: int,
        deterministic: bool = True,
        slot_sink: Optional[SlotSink] = None,
    ) -> list[EpisodeRecord]:
        """Frozen-policy rollouts without learning or velocity guidance."""
        logger.info(f"Evaluating {self.variant} for {episodes} episodes")
        return [
            self.run_episode(
                episode, episodes, learn=False, deterministic=deterministic, slot_sink=slot_sink
            )
            for episode in range(1, episodes + 1)
        ]

    def state_dict(self) -> dict[str, dict[str, np.ndarray]]:
        return {
            f"agent{agent.index}.{name}": module.state_dict()
            for agent in self.agents
            for name, module in agent.modules().items()
        }

    def load_state_dict(self, state: dict[str, dict[str, np.ndarray]]) -> None:
        for agent in self.agents:
            for name, module in agent.modules().items():
                key = f"agent{agent.index}.{name}"
                if key not in state:
                    raise KeyError(f"checkpoint has no parameters for {key}")
                module.load_state_dict(state[key])


def hmcd_train(
    cfg: ScenarioConfig,
    env_factory: Optional[Callable[[ScenarioConfig], UvaaEnv]] = None,
    variant: Variant = "hmcd",
    on_episode: Optional[Callable[[EpisodeRecord], None]] = None,
) -> tuple[HmcdCoordinator, list[EpisodeRecord]]:
    """Train a coordinator from scratch; returns it with its per-episode metrics."""
    env = env_factory(cfg) if env_factory is not None else None
    coordinator = HmcdCoordinator(cfg, variant=variant, env=env)
    records = coordinator.train(on_episode=on_episode)
    return coordinator, records
