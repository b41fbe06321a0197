"""Directional training comparisons; run with STAR_UVAA_RUN_SLOW=1."""

from functools import lru_cache

import numpy as np
import pytest

from star_uvaa.agents import HmcdCoordinator, baseline_random

from .conftest import tiny_config

pytestmark = pytest.mark.slow

SEEDS = (1, 2, 3)


def _tiny_training_config(seed: int, use_attention: bool = True):
    return tiny_config(
        seed=seed,
        mobility={"n_slots": 50},
        train={
            "n_episodes": 200,
            "batch_size": 128,
            "buffer_capacity": 20_000,
            "reward_scale": 0.1,
            "policy_hidden": [64, 64],
            "critic_embed": 64,
            "critic_hidden": [64, 64],
            "key_dim": 16,
            "use_attention": use_attention,
        },
    )


def _final_reward(records, window: int = 50) -> float:
    return float(np.mean([r.mean_reward for r in records[-window:]]))


@lru_cache(maxsize=None)
def _trained(seed: int, variant: str = "hmcd", use_attention: bool = True) -> float:
    cfg = _tiny_training_config(seed, use_attention)
    return _final_reward(HmcdCoordinator(cfg, variant=variant).train())


def test_hmcd_doubles_random_and_beats_independent():
    """Test that trained HMCD earns at least twice the uniform reward and more than SAL."""
    cfg = _tiny_training_config(seed=1)

    hmcd = _trained(1)
    independent = _trained(1, "sal")
    uniform = float(np.mean([r.mean_reward for r in baseline_random(cfg, 50)]))

    assert uniform > 0.0
    assert hmcd >= 2.0 * uniform
    assert hmcd > independent


def test_attention_helps_in_most_seeds():
    """Test the attention critic against the plain centralized critic."""
    wins = sum(_trained(seed) >= _trained(seed, use_attention=False) for seed in SEEDS)
    assert wins >= 2
