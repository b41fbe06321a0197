"""Training-dependent blend of the policy speed with an energy-optimal prior."""

import numpy as np

from ..env import ActionSpace
from ..nn import Tensor, as_tensor, clip, concat

SPEED = 1


def guidance_weight(episode: int, n_episodes: int) -> float:
    if n_episodes <= 0:
        return 1.0
    if not 0 <= episode <= n_episodes:
        raise ValueError(f"episode {episode} outside [0, {n_episodes}]")
    return episode / n_episodes


def velocity_transition(
    v_raw: float,
    episode: int,
    n_episodes: int,
    v_me: float,
    sigma_b: float,
    v_min: float,
    v_max: float,
    generator: np.random.Generator,
) -> float:
    """
    ζ·v_raw + (1 - ζ)·v_b with ζ = episode / n_episodes and v_b ~ N(v_me, σ_b²),
    clamped to [v_min, v_max].

    The prior sample is drawn on every call so the random stream advances the
    same way regardless of ζ.
    """
    zeta = guidance_weight(episode, n_episodes)
    v_b = generator.normal(v_me, sigma_b)
    return float(np.clip(zeta * v_raw + (1.0 - zeta) * v_b, v_min, v_max))


class SpeedGuidance:
    """
    The velocity transition of one episode applied to batches of normalized
    actions, differentiable in the policy speed.

    The learners pass their fresh samples through it so the critics are queried
    at the speeds the swarm actually flies.
    """

    def __init__(
        self,
        episode: int,
        n_episodes: int,
        v_me: float,
        sigma_b: float,
        action_space: ActionSpace,
    ):
        self.zeta = guidance_weight(episode, n_episodes)
        self.v_me = v_me
        self.sigma_b = sigma_b
        self.low = float(action_space.low[SPEED])
        self.high = float(action_space.high[SPEED])

    def _normalize(self, speed: np.ndarray) -> np.ndarray:
        span = self.high - self.low if self.high > self.low else 1.0
        return 2.0 * (speed - self.low) / span - 1.0

    def __call__(self, actions: Tensor, generator: np.random.Generator) -> Tensor:
        actions = as_tensor(actions)
        prior = self._normalize(generator.normal(self.v_me, self.sigma_b, (actions.shape[0], 1)))
        speed = clip(self.zeta * actions[:, SPEED : SPEED + 1] + (1.0 - self.zeta) * prior, -1.0, 1.0)
        return concat([actions[:, :SPEED], speed, actions[:, SPEED + 1 :]], axis=1)
