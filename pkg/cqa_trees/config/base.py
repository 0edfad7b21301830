"""Configuration models and loading of ``config.yml`` sections."""

import os
import re
from pathlib import Path
from typing import Any, ClassVar, Dict, Optional, Type, TypeVar

import pydantic
import yaml
from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator

from ..core.exceptions import ConfigurationError
from ..core.logging import get_logger
from ..core.utils import find_project_root

logger = get_logger('cqa_trees.config')

ENV_REFERENCE = re.compile(r'\$\{([^}]+)\}')

C = TypeVar('C', bound='BaseConfig')


def interpolate_env(value: Any) -> Any:
    """Replace ``${VAR}`` in every string of a nested YAML value.

    References to unset variables stay as written.
    """
    if isinstance(value, dict):
        return {k: interpolate_env(v) for k, v in value.items()}
    if isinstance(value, list):
        return [interpolate_env(v) for v in value]
    if not isinstance(value, str):
        return value

    def substitute(match: 're.Match[str]') -> str:
        name = match.group(1)
        if name not in os.environ:
            logger.warning("Environment variable not set", variable=name)
            return match.group(0)
        return os.environ[name]

    return ENV_REFERENCE.sub(substitute, value)


def read_yaml(path: Path) -> Dict[str, Any]:
    try:
        loaded = yaml.safe_load(path.read_text(encoding='utf-8'))
    except (OSError, yaml.YAMLError) as e:
        raise ConfigurationError(f"Failed to load config from {path}: {e}") from e
    return loaded or {}


class BaseConfig(BaseModel):
    """A config section: strict fields, validated assignment, env overrides.

    ``env_overrides`` maps field names to environment variables applied by
    ``load_from_env`` after the file has been read.
    """

    model_config = ConfigDict(extra='forbid', validate_assignment=True)

    env_overrides: ClassVar[Dict[str, str]] = {}

    @classmethod
    def from_dict(cls: Type[C], data: Optional[Dict[str, Any]]) -> C:
        """Validate a section dict after ``${VAR}`` interpolation.

        Raises:
            ConfigurationError: If validation fails
        """
        try:
            return cls.model_validate(interpolate_env(data or {}))
        except pydantic.ValidationError as e:
            raise ConfigurationError(f"Invalid configuration for {cls.__name__}: {e}") from e

    @classmethod
    def from_yaml(cls: Type[C], path: Path) -> C:
        return cls.from_dict(read_yaml(Path(path)))

    def load_from_env(self):
        """Apply the environment variables named in ``env_overrides``.

        Raises:
            ConfigurationError: If a variable holds an invalid value
        """
        for field, variable in self.env_overrides.items():
            raw = os.getenv(variable)
            if not raw:
                continue
            try:
                setattr(self, field, raw)
            except pydantic.ValidationError as e:
                raise ConfigurationError(f"{variable} is not a valid {field}: {raw!r}") from e
            logger.debug("Setting taken from environment", section=type(self).__name__, field=field, variable=variable)

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode='json', exclude_none=True)

    def to_yaml(self, path: Path):
        """Write the section as YAML.

        Raises:
            ConfigurationError: If the file cannot be written
        """
        try:
            Path(path).write_text(yaml.safe_dump(self.to_dict(), sort_keys=True), encoding='utf-8')
        except OSError as e:
            raise ConfigurationError(f"Failed to save config to {path}: {e}") from e


class EnvironmentConfig(BaseConfig):
    """Where configuration comes from."""

    environment: str = Field(default="development", description="development, ci or production")
    base_dir: Path = Field(default_factory=find_project_root, description="Directory holding config.yml")

    @field_validator('environment')
    @classmethod
    def validate_environment(cls, v: str) -> str:
        if v not in ('development', 'ci', 'production'):
            raise ValueError("Environment must be one of: ci, development, production")
        return v

    @classmethod
    def from_env(cls) -> 'EnvironmentConfig':
        """Read ``.env``, CQA_ENV and CQA_BASE_DIR."""
        load_dotenv()
        env = cls.from_dict({'environment': os.getenv('CQA_ENV', 'development')})
        if base_dir := os.getenv('CQA_BASE_DIR'):
            env.base_dir = Path(base_dir)
        return env


class ConfigurationManager:
    """Process-wide loader of named sections of the root ``config.yml``."""

    _instance: Optional['ConfigurationManager'] = None

    def __new__(cls):
        if cls._instance is None:
            instance = super().__new__(cls)
            instance._sections = {}
            instance.env = EnvironmentConfig.from_env()
            cls._instance = instance
        return cls._instance

    @property
    def config_path(self) -> Path:
        return self.env.base_dir / 'config.yml'

    def _root_config(self) -> Dict[str, Any]:
        if not self.config_path.exists():
            return {}
        try:
            return read_yaml(self.config_path)
        except ConfigurationError as e:
            logger.warning("Ignoring unreadable config file", path=str(self.config_path), error=str(e))
            return {}

    def load_config(self, config_class: Type[C], name: str) -> C:
        """Section ``name`` as ``config_class``, or its defaults when absent.

        Environment overrides are applied last; results are cached until
        ``clear_cache``.
        """
        cached = self._sections.get(name)
        if isinstance(cached, config_class):
            return cached

        section = self._root_config().get(name)
        loaded = config_class() if section is None else config_class.from_dict(section)
        loaded.load_from_env()
        self._sections[name] = loaded
        return loaded

    def clear_cache(self):
        """Forget loaded sections and re-read the environment."""
        self._sections.clear()
        self.env = EnvironmentConfig.from_env()
