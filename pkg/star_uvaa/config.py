"""Configuration loading: TOML files, environment settings and config hashing."""

import copy
import hashlib
import json
import os
from pathlib import Path
from typing import Any, Optional, Union

import toml
from dotenv import load_dotenv
from loguru import logger
from pydantic import ValidationError

from .data_model import ScenarioConfig
from .errors import ConfigError

ENV_LOG_LEVEL = "STAR_UVAA_LOG_LEVEL"
ENV_CONFIG = "STAR_UVAA_CONFIG"


def _format_validation_error(exc: ValidationError) -> str:
    parts = []
    for error in exc.errors():
        key = ".".join(str(part) for part in error["loc"]) or "<root>"
        parts.append(f"{key}: {error['msg']}")
    return "; ".join(parts)


def config_from_dict(data: dict[str, Any]) -> ScenarioConfig:
    """Validate a nested dictionary into a ScenarioConfig."""
    try:
        return ScenarioConfig.model_validate(data)
    except ValidationError as exc:
        message = _format_validation_error(exc)
        logger.error(f"Invalid configuration: {message}")
        raise ConfigError(message) from exc


def load_config(path: Optional[Union[str, Path]] = None) -> ScenarioConfig:
    """
    Load and validate a TOML scenario configuration.

    Args:
        path: TOML file; when omitted, STAR_UVAA_CONFIG is consulted and
            the documented defaults are used if that is unset too.

    Returns:
        Validated ScenarioConfig with defaults filled in
    """
    if path is None:
        path = default_config_path()
        if path is None:
            logger.debug("No configuration file given, using defaults")
            return ScenarioConfig()

    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")

    logger.debug(f"Loading configuration from {path}")
    try:
        data = toml.load(path)
    except toml.TomlDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    return config_from_dict(data)


def with_overrides(cfg: ScenarioConfig, overrides: dict[str, Any]) -> ScenarioConfig:
    """Return a re-validated copy with dotted keys (``"region.n_uavs"``) replaced."""
    data = copy.deepcopy(cfg.model_dump(mode="json"))
    for dotted, value in overrides.items():
        node = data
        *parents, leaf = dotted.split(".")
        for part in parents:
            if part not in node or not isinstance(node[part], dict):
                raise ConfigError(f"{dotted}: unknown configuration section")
            node = node[part]
        node[leaf] = value
    return config_from_dict(data)


def config_hash(cfg: ScenarioConfig) -> str:
    """Stable digest of everything except the seed."""
    payload = json.dumps(
        cfg.model_dump(mode="json", exclude={"seed"}), sort_keys=True, separators=(",", ":")
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def default_config_path() -> Optional[str]:
    load_dotenv()
    return os.getenv(ENV_CONFIG) or None


def log_level() -> str:
    load_dotenv()
    return os.getenv(ENV_LOG_LEVEL, "INFO").upper()
