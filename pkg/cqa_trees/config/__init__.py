"""Configuration management."""

from typing import Any, Dict, Optional

from .base import BaseConfig, ConfigurationManager, EnvironmentConfig
from .settings import (
    DEFAULT_ORACLE_CAP,
    DEFAULT_SEED,
    EngineConfig,
    FuzzConfig,
    LoggingConfig,
    OracleConfig,
    OutputConfig,
)
from ..core.logging import get_logger


class CQAConfig:
    """Unified configuration for the toolkit."""

    def __init__(self):
        self._config_manager = ConfigurationManager()
        self._oracle: Optional[OracleConfig] = None
        self._engine: Optional[EngineConfig] = None
        self._fuzz: Optional[FuzzConfig] = None
        self._logging: Optional[LoggingConfig] = None
        self._output: Optional[OutputConfig] = None
        self.reload()

    def reload(self):
        """Reload all sections from config.yml and the environment."""
        logger = get_logger('cqa_trees.config')
        self._config_manager.clear_cache()
        self._oracle = self._config_manager.load_config(OracleConfig, 'oracle')
        self._engine = self._config_manager.load_config(EngineConfig, 'engine')
        self._fuzz = self._config_manager.load_config(FuzzConfig, 'fuzz')
        self._logging = self._config_manager.load_config(LoggingConfig, 'logging')
        self._output = self._config_manager.load_config(OutputConfig, 'output')
        logger.debug("Configuration reloaded", oracle_cap=self._oracle.cap, seed=self._fuzz.seed)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'environment': self._config_manager.env.to_dict(),
            'oracle': self.oracle.to_dict(),
            'engine': self.engine.to_dict(),
            'fuzz': self.fuzz.to_dict(),
            'logging': self.logging.to_dict(),
            'output': self.output.to_dict(),
        }

    @property
    def oracle(self) -> OracleConfig:
        return self._oracle

    @property
    def engine(self) -> EngineConfig:
        return self._engine

    @property
    def fuzz(self) -> FuzzConfig:
        return self._fuzz

    @property
    def logging(self) -> LoggingConfig:
        return self._logging

    @property
    def output(self) -> OutputConfig:
        return self._output

    @property
    def environment(self) -> EnvironmentConfig:
        return self._config_manager.env


# Global configuration instance
config = CQAConfig()

__all__ = [
    'config',
    'CQAConfig',
    'BaseConfig',
    'ConfigurationManager',
    'EnvironmentConfig',
    'OracleConfig',
    'EngineConfig',
    'FuzzConfig',
    'LoggingConfig',
    'OutputConfig',
    'DEFAULT_ORACLE_CAP',
    'DEFAULT_SEED',
]
