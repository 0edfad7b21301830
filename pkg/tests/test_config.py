"""Tests for configuration loading."""

import pydantic
import pytest

from cqa_trees.config import (
    DEFAULT_ORACLE_CAP,
    ConfigurationManager,
    FuzzConfig,
    LoggingConfig,
    OracleConfig,
    config,
)
from cqa_trees.core.exceptions import ConfigurationError


def test_defaults():
    assert OracleConfig().cap == DEFAULT_ORACLE_CAP
    assert FuzzConfig().cases == 5000
    assert LoggingConfig().level == 'warning'


def test_validation():
    with pytest.raises(pydantic.ValidationError):
        OracleConfig(cap=0)
    with pytest.raises(pydantic.ValidationError):
        FuzzConfig(max_block=-1)
    with pytest.raises(ConfigurationError):
        OracleConfig.from_dict({'cap': 'many'})
    with pytest.raises(ConfigurationError):
        OracleConfig.from_dict({'unknown': 1})


def test_level_is_lowered():
    assert LoggingConfig(level='INFO').level == 'info'


def test_environment_overrides(monkeypatch):
    monkeypatch.setenv('CQA_ORACLE_CAP', '99')
    monkeypatch.setenv('CQA_SEED', '3')
    oracle, fuzz = OracleConfig(), FuzzConfig()
    oracle.load_from_env()
    fuzz.load_from_env()
    assert (oracle.cap, fuzz.seed) == (99, 3)


def test_bad_environment_value(monkeypatch):
    monkeypatch.setenv('CQA_SEED', 'abc')
    with pytest.raises(ConfigurationError):
        FuzzConfig().load_from_env()


def test_interpolation(monkeypatch):
    monkeypatch.setenv('TEST_CQA_CAP', '42')
    assert OracleConfig.from_dict({'cap': '${TEST_CQA_CAP}'}).cap == 42


def test_yaml_round_trip(tmp_path):
    path = tmp_path / 'fuzz.yml'
    FuzzConfig(seed=9, cases=12).to_yaml(path)
    loaded = FuzzConfig.from_yaml(path)
    assert (loaded.seed, loaded.cases) == (9, 12)
    with pytest.raises(ConfigurationError):
        FuzzConfig.from_yaml(tmp_path / 'missing.yml')


def test_sections_come_from_base_dir(tmp_path, monkeypatch):
    (tmp_path / 'config.yml').write_text("oracle:\n  cap: 77\nfuzz:\n  seed: 5\n")
    monkeypatch.setenv('CQA_BASE_DIR', str(tmp_path))
    try:
        config.reload()
        assert config.oracle.cap == 77
        assert config.fuzz.seed == 5
        assert config.environment.base_dir == tmp_path
        assert ConfigurationManager() is ConfigurationManager()
    finally:
        monkeypatch.delenv('CQA_BASE_DIR')
        config.reload()
