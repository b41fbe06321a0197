"""Fixed-capacity ring buffer of multi-agent transitions."""

import numpy as np
from pydantic import BaseModel, ConfigDict

from .data_model import Transition


class Batch(BaseModel):
    """Stacked sample of transitions"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    observations: np.ndarray  # (B, obs_dim)
    actions: np.ndarray  # (B, n_agents, action_dim)
    rewards: np.ndarray  # (B, n_agents)
    next_observations: np.ndarray  # (B, obs_dim)

    @property
    def size(self) -> int:
        return int(self.observations.shape[0])

    def agent_actions(self, agent: int) -> np.ndarray:
        return self.actions[:, agent, :]


class ReplayBuffer:
    """Preallocated arrays; the oldest transition is overwritten once full."""

    def __init__(self, capacity: int, obs_dim: int, n_agents: int, action_dim: int):
        if capacity < 1:
            raise ValueError("capacity must be positive")
        self.capacity = capacity
        self.observations = np.zeros((capacity, obs_dim))
        self.actions = np.zeros((capacity, n_agents, action_dim))
        self.rewards = np.zeros((capacity, n_agents))
        self.next_observations = np.zeros((capacity, obs_dim))
        self.pos = 0
        self.size = 0

    def push(self, transition: Transition) -> None:
        idx = self.pos % self.capacity
        self.observations[idx] = transition.observation
        self.actions[idx] = transition.actions
        self.rewards[idx] = transition.rewards
        self.next_observations[idx] = transition.next_observation
        self.pos += 1
        self.size = min(self.size + 1, self.capacity)

    def sample(self, batch_size: int, generator: np.random.Generator) -> Batch:
        """Uniform sample with replacement from the filled region."""
        if self.size == 0:
            raise ValueError("cannot sample from an empty buffer")
        indices = generator.integers(0, self.size, size=batch_size)
        return self.batch(indices)

    def batch(self, indices: np.ndarray) -> Batch:
        return Batch(
            observations=self.observations[indices],
            actions=self.actions[indices],
            rewards=self.rewards[indices],
            next_observations=self.next_observations[indices],
        )

    def ordered(self) -> Batch:
        """Stored transitions from oldest to newest."""
        if self.size < self.capacity:
            indices = np.arange(self.size)
        else:
            indices = (np.arange(self.capacity) + self.pos) % self.capacity
        return self.batch(indices)

    def __len__(self) -> int:
        return self.size
