"""Comparison controllers sharing the STAR-RIS annealing agent."""

from typing import Optional

from ..data_model import EpisodeRecord, ScenarioConfig
from ..env import UvaaEnv
from .coordinator import HmcdCoordinator


def baseline_random(
    cfg: ScenarioConfig, episodes: int, env: Optional[UvaaEnv] = None
) -> list[EpisodeRecord]:
    """Uniform actions within the bounds every slot."""
    coordinator = HmcdCoordinator(cfg, variant="random", env=env)
    return coordinator.evaluate(episodes, deterministic=False)


def baseline_independent_sac(
    cfg: ScenarioConfig, env: Optional[UvaaEnv] = None
) -> tuple[HmcdCoordinator, list[EpisodeRecord]]:
    """Per-agent SAC whose critics see only (s, a_m)."""
    coordinator = HmcdCoordinator(cfg, variant="sal", env=env)
    return coordinator, coordinator.train()


def baseline_masac(
    cfg: ScenarioConfig, env: Optional[UvaaEnv] = None
) -> tuple[HmcdCoordinator, list[EpisodeRecord]]:
    """Centralized MLP critics, no attention and no velocity guidance."""
    coordinator = HmcdCoordinator(cfg, variant="masac", env=env)
    return coordinator, coordinator.train()
