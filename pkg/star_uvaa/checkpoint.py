"""JSON checkpoints of the learned parameters, bound to a configuration hash."""

import json
from pathlib import Path
from typing import Union

import numpy as np
from loguru import logger

from .agents import HmcdCoordinator
from .config import config_hash
from .data_model import ScenarioConfig
from .errors import CheckpointError

FORMAT_VERSION = 1


def save_checkpoint(
    path: Union[str, Path], coordinator: HmcdCoordinator, episode: int
) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    document = {
        "format_version": FORMAT_VERSION,
        "config_hash": config_hash(coordinator.cfg),
        "variant": coordinator.variant,
        "episode": episode,
        "parameters": {
            module: {name: array.tolist() for name, array in params.items()}
            for module, params in coordinator.state_dict().items()
        },
    }
    with open(path, "w", encoding="utf-8") as f:
        json.dump(document, f)
    logger.success(f"Checkpoint for episode {episode} written to {path}")
    return path


def read_checkpoint(path: Union[str, Path], cfg: ScenarioConfig) -> dict:
    """Parse a checkpoint and refuse it unless it was written for ``cfg``."""
    path = Path(path)
    if not path.is_file():
        raise CheckpointError(f"checkpoint not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        document = json.load(f)
    if document.get("format_version") != FORMAT_VERSION:
        raise CheckpointError(
            f"unsupported checkpoint format {document.get('format_version')!r}"
        )
    expected = config_hash(cfg)
    if document.get("config_hash") != expected:
        logger.error(f"Checkpoint {path} was written for a different configuration")
        raise CheckpointError(
            f"config hash mismatch: checkpoint {document.get('config_hash')}, config {expected}"
        )
    return document


def load_checkpoint(path: Union[str, Path], coordinator: HmcdCoordinator) -> int:
    """Restore parameters into ``coordinator``; returns the stored episode counter."""
    document = read_checkpoint(path, coordinator.cfg)
    state = {
        module: {name: np.asarray(values, dtype=np.float64) for name, values in params.items()}
        for module, params in document["parameters"].items()
    }
    coordinator.load_state_dict(state)
    logger.info(f"Loaded checkpoint {path} (episode {document['episode']})")
    return int(document["episode"])
