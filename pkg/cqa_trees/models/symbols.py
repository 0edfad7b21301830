"""Variables and constants."""

from enum import Enum

from pydantic import BaseModel, ConfigDict, Field


class SymbolKind(str, Enum):
    """Disjoint namespaces of query terms."""

    VARIABLE = "variable"
    CONSTANT = "constant"


class Symbol(BaseModel):
    """A query term: a variable or a constant, compared by (kind, name)."""

    model_config = ConfigDict(frozen=True)

    kind: SymbolKind = Field(..., description="Variable or constant")
    name: str = Field(..., description="Variable name or constant value")

    @classmethod
    def var(cls, name: str) -> 'Symbol':
        return cls(kind=SymbolKind.VARIABLE, name=name)

    @classmethod
    def const(cls, value: str) -> 'Symbol':
        return cls(kind=SymbolKind.CONSTANT, name=value)

    @property
    def is_variable(self) -> bool:
        return self.kind is SymbolKind.VARIABLE

    @property
    def is_constant(self) -> bool:
        return self.kind is SymbolKind.CONSTANT

    def render(self) -> str:
        """Query-syntax rendering: constants are single-quoted."""
        return self.name if self.is_variable else f"'{self.name}'"

    def sort_key(self) -> tuple:
        return (self.kind.value, self.name)

    def __str__(self) -> str:
        return self.render()
