"""Configuration sections for evaluation, fuzzing and output."""

from typing import ClassVar, Dict, Literal

from pydantic import Field, field_validator

from .base import BaseConfig

DEFAULT_ORACLE_CAP = 1_000_000
DEFAULT_SEED = 20240607


class OracleConfig(BaseConfig):
    """Brute-force oracle configuration."""

    env_overrides: ClassVar[Dict[str, str]] = {'cap': 'CQA_ORACLE_CAP'}

    cap: int = Field(
        default=DEFAULT_ORACLE_CAP,
        description="Largest number of repairs the oracle will enumerate"
    )

    @field_validator('cap')
    @classmethod
    def validate_cap(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("cap must be positive")
        return v


class EngineConfig(BaseConfig):
    """Fixpoint engine configuration."""

    verify_decomposition: bool = Field(
        default=True,
        description="Cross-check C1/C2 against their branch/factor/prefix decomposition"
    )


class FuzzConfig(BaseConfig):
    """Seeded random corpora used by the selftest suite."""

    env_overrides: ClassVar[Dict[str, str]] = {'seed': 'CQA_SEED'}

    seed: int = Field(default=DEFAULT_SEED, description="Seed of every random corpus")
    cases: int = Field(default=5000, description="Query/database pairs per differential check")
    tree_cases: int = Field(default=2000, description="Random trees per query-level property")
    max_vertices: int = Field(default=8, description="Largest random tree query")
    max_adom: int = Field(default=6, description="Largest active domain of a random database")
    max_block: int = Field(default=3, description="Largest block of a random database")
    max_repairs: int = Field(default=4096, description="Largest repair count of a random database")
    max_dag_vertices: int = Field(default=4, description="Largest DAG of the reachability sweep")
    max_cnf_variables: int = Field(default=3, description="Most variables in the SAT sweep")
    max_cnf_clauses: int = Field(default=3, description="Most clauses in the SAT sweep")

    @field_validator('cases', 'tree_cases', 'max_vertices', 'max_adom', 'max_block',
                     'max_repairs', 'max_dag_vertices', 'max_cnf_variables', 'max_cnf_clauses')
    @classmethod
    def validate_positive(cls, v: int) -> int:
        if v <= 0:
            raise ValueError("Value must be positive")
        return v


class LoggingConfig(BaseConfig):
    """Logging configuration."""

    level: Literal['debug', 'info', 'warning', 'error', 'critical'] = Field(
        default='warning',
        description="Default console log level of the CLI"
    )
    file: str = Field(default='cqa_trees.log', description="Main log file name")

    @field_validator('level', mode='before')
    @classmethod
    def lower_level(cls, v: str) -> str:
        return v.lower() if isinstance(v, str) else v


class OutputConfig(BaseConfig):
    """CLI output configuration."""

    default_format: Literal['text', 'json'] = Field(
        default='text',
        description="Rendering of run reports"
    )
