"""General Boolean conjunctive queries with primary keys."""

from typing import Dict, Iterable, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..core.exceptions import ArityError
from ..core.logging import get_logger
from .symbols import Symbol

logger = get_logger('cqa_trees.models.graph_query')


class Atom(BaseModel):
    """Relation atom whose first ``key_arity`` arguments form the primary key."""

    model_config = ConfigDict(frozen=True)

    relation: str = Field(..., description="Relation name")
    key_arity: int = Field(..., description="Number of leading key positions")
    args: Tuple[Symbol, ...] = Field(..., description="Arguments, key first")

    @model_validator(mode='after')
    def check_key_arity(self) -> 'Atom':
        if not 1 <= self.key_arity <= len(self.args):
            raise ValueError(f"{self.relation}: key arity {self.key_arity} outside 1..{len(self.args)}")
        return self

    @property
    def arity(self) -> int:
        return len(self.args)

    @property
    def key(self) -> Tuple[Symbol, ...]:
        return self.args[:self.key_arity]

    @property
    def values(self) -> Tuple[Symbol, ...]:
        return self.args[self.key_arity:]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.arity, self.key_arity

    def variables(self) -> List[str]:
        """Variable names in order of first occurrence."""
        seen: List[str] = []
        for arg in self.args:
            if arg.is_variable and arg.name not in seen:
                seen.append(arg.name)
        return seen

    def key_variables(self) -> List[str]:
        return [a.name for a in self.key if a.is_variable]

    def render(self) -> str:
        key = ", ".join(a.render() for a in self.key)
        values = ", ".join(a.render() for a in self.values)
        return f"{self.relation}({key}; {values})" if values else f"{self.relation}({key};)"

    def sort_key(self) -> tuple:
        return (self.relation, self.key_arity, tuple(a.sort_key() for a in self.args))

    def __str__(self) -> str:
        return self.render()


class GraphQuery(BaseModel):
    """Boolean conjunctive query as an ordered, duplicate-free atom set."""

    model_config = ConfigDict(frozen=True)

    atoms: Tuple[Atom, ...] = Field(..., description="Atoms in input order")

    @field_validator('atoms')
    @classmethod
    def deduplicate(cls, atoms: Tuple[Atom, ...]) -> Tuple[Atom, ...]:
        if not atoms:
            raise ValueError("a query has at least one atom")
        return tuple(dict.fromkeys(atoms))

    @model_validator(mode='after')
    def check_schema(self) -> 'GraphQuery':
        shapes: Dict[str, Tuple[int, int]] = {}
        for atom in self.atoms:
            known = shapes.setdefault(atom.relation, atom.shape)
            if known != atom.shape:
                raise ArityError(
                    atom.relation,
                    f"used with arity/key arity {known} and {atom.shape}"
                )
        return self

    @classmethod
    def of(cls, atoms: Iterable[Atom]) -> 'GraphQuery':
        return cls(atoms=tuple(atoms))

    @classmethod
    def parse(cls, text: str) -> 'GraphQuery':
        from .syntax import parse_graph_query
        return parse_graph_query(text)

    def __len__(self) -> int:
        return len(self.atoms)

    def __iter__(self):
        return iter(self.atoms)

    @property
    def schema(self) -> Dict[str, Tuple[int, int]]:
        """Relation name to (arity, key arity)."""
        return {a.relation: a.shape for a in self.atoms}

    def variables(self) -> List[str]:
        seen: Dict[str, None] = {}
        for atom in self.atoms:
            for name in atom.variables():
                seen.setdefault(name)
        return list(seen)

    def constants(self) -> List[str]:
        return sorted({a.name for atom in self.atoms for a in atom.args if a.is_constant})

    @property
    def is_selfjoinfree(self) -> bool:
        return len({a.relation for a in self.atoms}) == len(self.atoms)

    def graphbcq_violations(self) -> List[str]:
        """Reasons this query falls outside GraphBCQ (empty when it is inside)."""
        problems: List[str] = []
        key_owner: Dict[str, Atom] = {}
        for atom in self.atoms:
            if atom.key_arity != 1:
                problems.append(f"{atom.render()} has key arity {atom.key_arity}")
                continue
            key = atom.key[0]
            if not key.is_variable:
                problems.append(f"{atom.render()} has a constant key")
            names = [a.name for a in atom.args if a.is_variable]
            if len(names) != len(set(names)):
                problems.append(f"{atom.render()} repeats a variable")
            if key.is_variable:
                other = key_owner.setdefault(key.name, atom)
                if other is not atom:
                    problems.append(f"{other.render()} and {atom.render()} share key variable {key.name}")
        return problems

    @property
    def is_graphbcq(self) -> bool:
        return not self.graphbcq_violations()

    def subquery(self, indices: Iterable[int]) -> 'GraphQuery':
        return GraphQuery(atoms=tuple(self.atoms[i] for i in sorted(set(indices))))

    def without(self, atom: Atom) -> Optional['GraphQuery']:
        """The query minus one atom, or None when nothing would remain."""
        rest = tuple(a for a in self.atoms if a != atom)
        return GraphQuery(atoms=rest) if rest else None

    def self_join_free(self) -> Tuple['GraphQuery', Dict[str, Atom]]:
        """Rename every atom to its own relation.

        Returns:
            The self-join-free query and the map from each new relation
            name to the atom of this query it stands for
        """
        used = {a.relation for a in self.atoms}
        correspondence: Dict[str, Atom] = {}
        renamed: List[Atom] = []
        for i, atom in enumerate(self.atoms):
            name = f"{atom.relation}_{i}"
            while name in used:
                name += "_"
            used.add(name)
            correspondence[name] = atom
            renamed.append(Atom(relation=name, key_arity=atom.key_arity, args=atom.args))
        return GraphQuery(atoms=tuple(renamed)), correspondence

    def render(self) -> str:
        return ", ".join(a.render() for a in self.atoms)

    def __str__(self) -> str:
        return self.render()

    def require_graphbcq(self, operation: str):
        """Raise NotGraphBCQError unless this query is in GraphBCQ."""
        from ..core.exceptions import NotGraphBCQError
        problems = self.graphbcq_violations()
        if problems:
            raise NotGraphBCQError(operation, problems)
