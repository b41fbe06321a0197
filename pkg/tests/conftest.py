import os

import pytest

from star_uvaa.config import config_from_dict
from star_uvaa.data_model import ScenarioConfig
from star_uvaa.rng import RngStream

RUN_SLOW = os.getenv("STAR_UVAA_RUN_SLOW") == "1"


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running directional checks")


def pytest_collection_modifyitems(config, items):
    if RUN_SLOW:
        return
    skip_slow = pytest.mark.skip(reason="set STAR_UVAA_RUN_SLOW=1 to run")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


def tiny_config(**sections) -> ScenarioConfig:
    """Small scenario for fast tests; keyword arguments update whole sections."""
    data = {
        "seed": 3,
        "region": {"n_uavs": 2},
        "ris": {"rows": 2, "cols": 2},
        "radio": {"quad_theta": 16, "quad_phi": 32},
        "mobility": {"n_slots": 3},
        "train": {
            "n_episodes": 2,
            "batch_size": 4,
            "buffer_capacity": 64,
            "policy_hidden": [8],
            "critic_embed": 8,
            "critic_hidden": [8, 8],
            "key_dim": 4,
            "checkpoint_every": 0,
        },
    }
    for section, values in sections.items():
        if isinstance(values, dict):
            data.setdefault(section, {}).update(values)
        else:
            data[section] = values
    return config_from_dict(data)


@pytest.fixture
def default_cfg():
    """Configuration with every documented default."""
    return ScenarioConfig()


@pytest.fixture
def tiny_cfg():
    """Two UAVs, four STAR-RIS elements, three slots."""
    return tiny_config()


@pytest.fixture
def rng():
    """Random streams with a fixed seed."""
    return RngStream(1234)
