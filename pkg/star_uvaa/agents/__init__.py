"""
Decision makers of the simulator

- GaussianPolicy: tanh-squashed Gaussian actor of one UAV
- AttentionCritic / MlpCritic: soft Q-functions
- UavAgent: actor, critics and target copies of one UAV
- StarRisAgent: per-slot annealing controller of the STAR-RIS
- HmcdCoordinator: runs training and evaluation for every variant
"""

from ..star_ris import StarRisAgent
from .baselines import baseline_independent_sac, baseline_masac, baseline_random
from .coordinator import HmcdCoordinator, hmcd_train
from .critic import AttentionCritic, MlpCritic, attention_q
from .masac import UavAgent, actor_update, critic_update, update_targets
from .policy import GaussianPolicy, policy_sample
from .velocity import velocity_transition

__all__ = [
    "GaussianPolicy",
    "policy_sample",
    "AttentionCritic",
    "MlpCritic",
    "attention_q",
    "UavAgent",
    "critic_update",
    "actor_update",
    "update_targets",
    "velocity_transition",
    "StarRisAgent",
    "HmcdCoordinator",
    "hmcd_train",
    "baseline_random",
    "baseline_independent_sac",
    "baseline_masac",
]


def create_hmcd(cfg, variant: str = "hmcd") -> HmcdCoordinator:
    """
    Convenience function to create a coordinator with all agents.

    Args:
        cfg: Validated scenario configuration
        variant: ``hmcd``, ``masac``, ``sal`` or ``random``

    Returns:
        HmcdCoordinator instance ready for training or evaluation
    """
    return HmcdCoordinator(cfg, variant=variant)
