"""Facts and database instances under primary keys."""

import math
import re
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.exceptions import ArityError, InconsistentDatabaseError
from ..core.logging import get_logger

logger = get_logger('cqa_trees.models.database')

_BARE_CONSTANT = re.compile(r"^[^\s,;()'#]+$")

BlockId = Tuple[str, Tuple[str, ...]]


def render_constant(value: str) -> str:
    """Fact-file rendering: bare when possible, single-quoted otherwise."""
    return value if _BARE_CONSTANT.match(value) else f"'{value}'"


class Fact(BaseModel):
    """A ground atom R(key; values)."""

    model_config = ConfigDict(frozen=True)

    relation: str = Field(..., description="Relation name")
    key: Tuple[str, ...] = Field(..., description="Primary-key constants")
    values: Tuple[str, ...] = Field(default=(), description="Non-key constants")

    @model_validator(mode='after')
    def check_key(self) -> 'Fact':
        if not self.key:
            raise ValueError(f"{self.relation}: a fact has a non-empty key")
        return self

    @property
    def args(self) -> Tuple[str, ...]:
        return self.key + self.values

    @property
    def shape(self) -> Tuple[int, int]:
        """(arity, key arity)."""
        return len(self.key) + len(self.values), len(self.key)

    @property
    def block_id(self) -> BlockId:
        return self.relation, self.key

    def sort_key(self) -> tuple:
        return (self.relation, self.key, self.values)

    def render(self) -> str:
        key = ", ".join(render_constant(c) for c in self.key)
        values = ", ".join(render_constant(c) for c in self.values)
        return f"{self.relation}({key}; {values})" if values else f"{self.relation}({key};)"

    def __str__(self) -> str:
        return self.render()


def fact(relation: str, key, *values: str) -> Fact:
    """Shorthand: ``fact('R', 'a', 'b')`` is R(a; b); a tuple key gives a composite key."""
    key = tuple(key) if isinstance(key, (tuple, list)) else (key,)
    return Fact(relation=relation, key=key, values=tuple(values))


class Database(BaseModel):
    """A finite set of facts with its block structure.

    Two facts share a block iff they agree on relation name and key. Every
    relation name is used with a single arity and key arity.
    """

    model_config = ConfigDict(frozen=True)

    facts: FrozenSet[Fact] = Field(default_factory=frozenset)

    @model_validator(mode='after')
    def check_schema(self) -> 'Database':
        shapes: Dict[str, Tuple[int, int]] = {}
        for f in sorted(self.facts, key=Fact.sort_key):
            known = shapes.setdefault(f.relation, f.shape)
            if known != f.shape:
                raise ArityError(
                    f.relation,
                    f"facts use arity/key arity {known} and {f.shape}"
                )
        return self

    @classmethod
    def of(cls, facts: Iterable[Fact]) -> 'Database':
        return cls(facts=frozenset(facts))

    @classmethod
    def parse(cls, text: str) -> 'Database':
        from .syntax import parse_database
        return parse_database(text)

    def __len__(self) -> int:
        return len(self.facts)

    def __iter__(self) -> Iterator[Fact]:
        return iter(self.sorted_facts)

    def __contains__(self, item: object) -> bool:
        return item in self.facts

    def __or__(self, other: 'Database') -> 'Database':
        return Database(facts=self.facts | other.facts)

    @cached_property
    def sorted_facts(self) -> Tuple[Fact, ...]:
        return tuple(sorted(self.facts, key=Fact.sort_key))

    @cached_property
    def blocks(self) -> Dict[BlockId, Tuple[Fact, ...]]:
        """Blocks keyed by (relation, key), in sorted order, facts sorted."""
        grouped: Dict[BlockId, List[Fact]] = {}
        for f in self.sorted_facts:
            grouped.setdefault(f.block_id, []).append(f)
        return {bid: tuple(fs) for bid, fs in grouped.items()}

    def block(self, relation: str, key: Tuple[str, ...]) -> Tuple[Fact, ...]:
        """R(c,*): possibly empty."""
        return self.blocks.get((relation, tuple(key)), ())

    @cached_property
    def adom(self) -> FrozenSet[str]:
        return frozenset(c for f in self.facts for c in f.args)

    @cached_property
    def schema(self) -> Dict[str, Tuple[int, int]]:
        return {f.relation: f.shape for f in self.facts}

    @property
    def consistent(self) -> bool:
        return all(len(fs) == 1 for fs in self.blocks.values())

    @property
    def repair_count(self) -> int:
        return math.prod(len(fs) for fs in self.blocks.values())

    def inconsistent_blocks(self) -> Dict[BlockId, Tuple[Fact, ...]]:
        return {bid: fs for bid, fs in self.blocks.items() if len(fs) > 1}

    def relations(self) -> Set[str]:
        return {f.relation for f in self.facts}

    def require_consistent(self, operation: str):
        """Raise InconsistentDatabaseError unless every block is a singleton."""
        bad = self.inconsistent_blocks()
        if bad:
            relation, key = next(iter(bad))
            raise InconsistentDatabaseError(
                operation,
                f"{len(bad)} blocks have more than one fact, e.g. {relation}({', '.join(key)},*)"
            )

    def restrict(self, facts: Iterable[Fact]) -> 'Database':
        """Sub-instance of the given facts (which must belong to this database)."""
        chosen = frozenset(facts)
        missing: Optional[Fact] = next((f for f in chosen if f not in self.facts), None)
        if missing is not None:
            raise ValueError(f"{missing.render()} is not in the database")
        return Database(facts=chosen)

    def to_text(self) -> str:
        """Fact-file text, one fact per line, sorted."""
        return "".join(f.render() + "\n" for f in self.sorted_facts)

    def summary(self) -> Dict[str, int]:
        return {
            'facts': len(self.facts),
            'blocks': len(self.blocks),
            'inconsistent_blocks': len(self.inconsistent_blocks()),
            'repairs': self.repair_count,
        }
