"""Configuration helpers for the symmetry mapper."""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, Mapping, MutableMapping, Optional

try:  # Optional dependency so tests don't require python-dotenv
    from dotenv import load_dotenv
except ImportError:  # pragma: no cover - fallback when dependency is missing
    def load_dotenv(*args, **kwargs):  # type: ignore[override]
        return False

CACHE_DIR_ENV = "SYMMAP_CACHE_DIR"
LOG_LEVEL_ENV = "SYMMAP_LOG_LEVEL"

_env_loaded = False
_config_cache: Dict[str, "AppConfig"] = {}


def load_environment(dotenv_path: Optional[str] = None, *, override: bool = False) -> None:
    """Ensure environment variables from a .env file are loaded once."""
    global _env_loaded

    if _env_loaded and dotenv_path is None:
        return

    load_dotenv(dotenv_path=dotenv_path, override=override)
    _env_loaded = True


@dataclass
class PathSettings:
    """Where fixtures, cached generators and results live."""

    data: MutableMapping[str, Any] = field(default_factory=dict)

    @property
    def workspace_dir(self) -> str:
        return self.data.get("workspace_dir", ".")

    @property
    def cache_dir(self) -> str:
        return self.data.get("cache_dir", "cache/generators")

    @property
    def results_dir(self) -> str:
        return self.data.get("results_dir", "results")

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.data)


@dataclass
class SymmetrySettings:
    data: MutableMapping[str, Any] = field(default_factory=dict)

    @property
    def closure_cap(self) -> int:
        return int(self.data.get("closure_cap", 5_000_000))

    @property
    def seed_with_group(self) -> bool:
        return bool(self.data.get("seed_with_group", True))

    def to_dict(self) -> Dict[str, Any]:
        return dict(self.data)


@dataclass
class GASettings:
    """Defaults for the mu+lambda mapping search; run configs override them."""

    data: MutableMapping[str, Any] = field(default_factory=dict)

    @property
    def population(self) -> int:
        return int(self.data.get("population", 20))

    @property
    def children(self) -> int:
        return int(self.data.get("children", 20))

    @property
    def generations(self) -> int:
        return int(self.data.get("generations", 50))

    @property
    def audit_rate(self) -> float:
        return float(self.data.get("audit_rate", 0.1))

    @property
    def workers(self) -> int:
        return int(self.data.get("workers", 1))

    def to_dict(self) -> Dict[str, Any]:
        return {k: v for k, v in self.data.items() if not k.startswith("_")}


@dataclass
class SubarchSettings:
    data: MutableMapping[str, Any] = field(default_factory=dict)

    @property
    def strategy(self) -> str:
        return self.data.get("strategy", "inv-semi")

    @property
    def deadline(self) -> Optional[int]:
        return self.data.get("deadline")

    def to_dict(self) -> Dict[str, Any]:
        return {k: v for k, v in self.data.items() if not k.startswith("_")}


class AppConfig(Mapping[str, Any]):
    """Wrapper around configuration data with convenience helpers."""

    def __init__(self, data: MutableMapping[str, Any], source_path: Optional[str] = None):
        self._data = data
        self._source_path = source_path
        self.paths = PathSettings(data.get("paths", {}))
        self.symmetry = SymmetrySettings(data.get("symmetry", {}))
        self.ga = GASettings(data.get("ga", {}))
        self.subarch = SubarchSettings(data.get("subarch", {}))

    @property
    def log_level(self) -> str:
        load_environment()
        return os.getenv(LOG_LEVEL_ENV) or self._data.get("logging", {}).get("level", "WARNING")

    def get(self, key: str, default: Any = None) -> Any:
        return self._data.get(key, default)

    def __getitem__(self, key: str) -> Any:
        return self._data[key]

    def __iter__(self) -> Iterator[str]:
        return iter(self._data)

    def __len__(self) -> int:
        return len(self._data)

    def to_dict(self) -> Dict[str, Any]:
        return dict(self._data)


def load_app_config(config_path: str = "config.json") -> AppConfig:
    """Load configuration once and expose it as a structured object.

    A missing file yields the built-in defaults.
    """

    absolute_path = os.path.abspath(config_path)
    cached = _config_cache.get(absolute_path)
    if cached is not None:
        return cached

    if os.path.exists(absolute_path):
        with open(absolute_path, "r", encoding="utf-8") as f:
            data = json.load(f)
    else:
        logging.getLogger(__name__).debug("No config file at %s, using defaults", absolute_path)
        data = {}

    config = AppConfig(data, source_path=absolute_path)
    _config_cache[absolute_path] = config
    return config


def app_config_from_dict(data: MutableMapping[str, Any], *, source_path: Optional[str] = None) -> AppConfig:
    """Build an :class:`AppConfig` directly from a dictionary (primarily for tests)."""

    return AppConfig(data, source_path=source_path)


def clear_cached_configs() -> None:
    """Clear cached configuration objects (useful for tests)."""

    _config_cache.clear()


def resolve_cache_dir(explicit: Optional[str] = None, config: Optional[AppConfig] = None) -> str:
    """Prefer an explicit directory, then ``SYMMAP_CACHE_DIR``, then the config file."""

    if explicit:
        return explicit
    load_environment()
    from_env = os.getenv(CACHE_DIR_ENV)
    if from_env:
        return from_env
    config = config or load_app_config()
    return config.paths.cache_dir
