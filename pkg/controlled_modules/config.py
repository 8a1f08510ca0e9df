"""Centralized configuration management."""

import os
from pathlib import Path
from typing import Any, Optional

import yaml

from .constants import (
    DEFAULT_HOM_BOUND,
    DEFAULT_SEED,
    ENV_HOM_BOUND,
    ENV_REPORTS_DIR,
    ENV_SEED,
    ENV_TRUNCATION,
    MIN_TRUNCATION,
    TRUNCATION_PADDING,
)
from .exceptions import ConfigError
from .logging_config import get_logger

logger = get_logger("config")


def _parse_int(raw: Any, name: str, minimum: int = 0) -> int:
    try:
        value = int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"Invalid integer for {name}: {raw!r}")
    if value < minimum:
        raise ConfigError(f"{name} must be >= {minimum}, got {value}")
    return value


class Config:
    """Application configuration.

    Every setting resolves environment variable first, then the YAML config
    file, then the class default.
    """

    CONFIG_DIR = Path.home() / ".config" / "controlled-modules"
    CONFIG_FILE = CONFIG_DIR / "config.yaml"

    DEFAULT_REPORTS_DIR = Path("reports")
    DEFAULT_TRUNCATION: Optional[int] = None  # None means longest interval + padding

    def __init__(self, config_file: Optional[Path] = None):
        self._config: dict = {}
        self._config_file = Path(config_file) if config_file else self.CONFIG_FILE
        self._load_config()

    def _load_config(self) -> None:
        """Load configuration from file."""
        if not self._config_file.exists():
            logger.debug("Config file not found: %s", self._config_file)
            return

        try:
            with open(self._config_file, "r", encoding="utf-8") as f:
                loaded = yaml.safe_load(f) or {}
            if not isinstance(loaded, dict):
                logger.error("Config file is not a mapping: %s", self._config_file)
                loaded = {}
            self._config = loaded
            logger.debug("Loaded config from: %s", self._config_file)
        except yaml.YAMLError as e:
            logger.error("Failed to parse config file: %s", e)
            self._config = {}
        except OSError as e:
            logger.error("Failed to read config file: %s", e)
            self._config = {}

    def _lookup(self, env_name: str, key: str) -> Any:
        env_value = os.environ.get(env_name)
        if env_value:
            return env_value
        return self._config.get(key)

    @property
    def truncation(self) -> Optional[int]:
        """Default telescope truncation bound, or None for the adaptive default."""
        raw = self._lookup(ENV_TRUNCATION, "truncation")
        if raw is None:
            return self.DEFAULT_TRUNCATION
        return _parse_int(raw, "truncation", MIN_TRUNCATION)

    @property
    def reports_dir(self) -> Path:
        """Directory where run reports are written."""
        raw = self._lookup(ENV_REPORTS_DIR, "reports_dir")
        return Path(raw).expanduser() if raw else self.DEFAULT_REPORTS_DIR

    @property
    def hom_bound(self) -> int:
        """Maximum number of unknowns for hom-simplex solving."""
        raw = self._lookup(ENV_HOM_BOUND, "hom_bound")
        return DEFAULT_HOM_BOUND if raw is None else _parse_int(raw, "hom_bound", 1)

    @property
    def seed(self) -> int:
        """Seed for randomized generators."""
        raw = self._lookup(ENV_SEED, "seed")
        return DEFAULT_SEED if raw is None else _parse_int(raw, "seed")

    def resolve_truncation(self, longest_interval: int, override: Optional[int] = None) -> int:
        """Pick the truncation bound for a telescope construction.

        Args:
            longest_interval: Length of the longest interval involved
            override: Explicit bound from the caller (wins over everything)

        Returns:
            The bound N to materialize
        """
        if override is not None:
            return _parse_int(override, "truncation", MIN_TRUNCATION)
        configured = self.truncation
        if configured is not None:
            return configured
        return longest_interval + TRUNCATION_PADDING


# Singleton instance
_config: Optional[Config] = None


def get_config() -> Config:
    """Get the global config instance."""
    global _config
    if _config is None:
        _config = Config()
    return _config


def reset_config() -> None:
    """Reset the global config instance (for testing)."""
    global _config
    _config = None
