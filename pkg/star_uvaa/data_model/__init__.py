"""Data models package for the STAR-RIS assisted UAV array simulator."""

# Base models
from .base import Position3

# Channel models
from .channel import AngleSet, ChannelRealization

# Configuration models
from .config import (
    EnergyConfig,
    MobilityConfig,
    RadioConfig,
    RegionConfig,
    RewardParams,
    RisConfig,
    SaConfig,
    ScenarioConfig,
    TrainConfig,
)
from .energy import AeroParams

# Outcome models
from .outcome import (
    ConstraintFlags,
    EpisodeRecord,
    RunManifest,
    SlotMetrics,
    StepOutcome,
    Transition,
    UavAction,
)

# STAR-RIS models
from .ris import AnnealSchedule, CandidateSet, StarRisState, wrap_phase

# State models
from .state import Side, SwarmState, UavState, UserState

__all__ = [
    # Base models
    "Position3",
    # Configuration models
    "RegionConfig",
    "RisConfig",
    "RadioConfig",
    "MobilityConfig",
    "EnergyConfig",
    "SaConfig",
    "RewardParams",
    "TrainConfig",
    "ScenarioConfig",
    "AeroParams",
    # State models
    "Side",
    "UavState",
    "SwarmState",
    "UserState",
    # STAR-RIS models
    "StarRisState",
    "AnnealSchedule",
    "CandidateSet",
    "wrap_phase",
    # Channel models
    "AngleSet",
    "ChannelRealization",
    # Outcome models
    "UavAction",
    "ConstraintFlags",
    "SlotMetrics",
    "StepOutcome",
    "Transition",
    "EpisodeRecord",
    "RunManifest",
]
