"""
Configuration utilities for the qudit teleportation simulator
"""
import logging
import os
from typing import Any, Dict, List, Optional

import yaml
from pydantic import BaseModel, Field, ValidationError, field_validator

from utils.errors import ConfigError

CONFIG_ENV_VAR = "CONFIG_PATH"


class SimulationSettings(BaseModel):
    """Defaults for protocol runs"""
    seed: int = Field(7, ge=0)
    trials: int = Field(1000, ge=1)
    probe_count: int = Field(5, ge=3)
    workers: int = Field(1, ge=1)
    l_choice: Optional[List[int]] = None


class SweepSettings(BaseModel):
    """Defaults for resource sweeps"""
    family: str = "qubit-n"
    points: int = Field(20, ge=1)
    trials: int = Field(2000, ge=1)

    @field_validator("family")
    @classmethod
    def _known_family(cls, value: str) -> str:
        if value not in ("qubit-n", "dirichlet-random", "two-level-qudit"):
            raise ValueError(f"unknown sweep family: {value}")
        return value


class VerifySettings(BaseModel):
    """Defaults for the invariant suite"""
    d_min: int = Field(2, ge=2)
    d_max: int = Field(6, ge=2)
    samples: int = Field(10, ge=1)


class LoggingSettings(BaseModel):
    """Logging configuration"""
    level: str = "warning"
    file_path: Optional[str] = None
    max_size_mb: int = 10
    backup_count: int = 5
    format: str = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class AppConfig(BaseModel):
    """Top-level configuration"""
    simulation: SimulationSettings = SimulationSettings()
    sweep: SweepSettings = SweepSettings()
    verify: VerifySettings = VerifySettings()
    logging: LoggingSettings = LoggingSettings()


def resolve_config_path(explicit_path: Optional[str] = None) -> Optional[str]:
    """
    Pick the configuration file to load

    Args:
        explicit_path: Path given on the command line, if any

    Returns:
        Path to load, or None to use built-in defaults
    """
    if explicit_path:
        return explicit_path
    return os.environ.get(CONFIG_ENV_VAR) or None


def load_config(config_path: Optional[str] = None) -> AppConfig:
    """
    Load configuration from YAML file

    Sections missing from the file fall back to defaults.

    Args:
        config_path: Path to the configuration file, or None for defaults

    Returns:
        Validated configuration

    Raises:
        ConfigError: If the file cannot be read or does not validate
    """
    logger = logging.getLogger(__name__)

    if config_path is None:
        logger.debug("No configuration file given, using defaults")
        return AppConfig()

    try:
        with open(config_path, "r") as config_file:
            raw: Dict[str, Any] = yaml.safe_load(config_file) or {}
    except (OSError, yaml.YAMLError) as e:
        logger.error(f"Error loading configuration from {config_path}: {str(e)}")
        raise ConfigError(f"cannot load configuration {config_path}: {e}") from e

    try:
        config = AppConfig.model_validate(raw)
    except ValidationError as e:
        logger.error(f"Invalid configuration in {config_path}: {str(e)}")
        raise ConfigError(f"invalid configuration {config_path}: {e}") from e

    logger.info(f"Configuration loaded from {config_path}")
    return config
