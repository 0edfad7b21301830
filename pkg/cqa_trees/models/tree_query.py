"""Rooted tree queries: ordered labeled trees whose vertices are query variables."""

import re
from collections import deque
from enum import Enum
from functools import cached_property
from typing import Dict, Iterable, Iterator, List, Optional, Set, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..core.exceptions import ArityError, ValidationError, VertexNotFoundError
from ..core.logging import get_logger
from .graph_query import Atom, GraphQuery
from .symbols import Symbol

logger = get_logger('cqa_trees.models.tree_query')

_FRESH_NAME = re.compile(r'^x(\d+)$')


class LabelKind(str, Enum):
    """What a tree vertex stands for."""

    RELATION = "relation"
    UNARY = "unary"
    CONSTANT = "constant"
    BOTTOM = "bottom"


class Label(BaseModel):
    """Vertex label: a relation name, a unary relation name, a constant or ⊥."""

    model_config = ConfigDict(frozen=True)

    kind: LabelKind
    name: str = ""

    @classmethod
    def relation(cls, name: str) -> 'Label':
        return cls(kind=LabelKind.RELATION, name=name)

    @classmethod
    def unary(cls, name: str) -> 'Label':
        return cls(kind=LabelKind.UNARY, name=name)

    @classmethod
    def constant(cls, value: str) -> 'Label':
        return cls(kind=LabelKind.CONSTANT, name=value)

    @classmethod
    def bottom(cls) -> 'Label':
        return cls(kind=LabelKind.BOTTOM)

    def render(self) -> str:
        if self.kind is LabelKind.CONSTANT:
            return f"'{self.name}'"
        if self.kind is LabelKind.BOTTOM:
            return "_"
        return self.name

    def __str__(self) -> str:
        return self.render()


class Sketch(BaseModel):
    """Nested, index-free form of a tree used to build and rebuild queries.

    ``name`` pins the variable name of a vertex; unnamed variable vertices
    receive fresh ``x<k>`` names when the sketch becomes a TreeQuery.
    """

    model_config = ConfigDict(frozen=True)

    label: Label
    name: Optional[str] = None
    children: Tuple['Sketch', ...] = ()


Sketch.model_rebuild()


class Vertex(BaseModel):
    """One vertex of a TreeQuery, addressed by its breadth-first index."""

    model_config = ConfigDict(frozen=True)

    index: int = Field(..., description="Breadth-first position in the query")
    name: Optional[str] = Field(None, description="Variable name; None for constant vertices")
    label: Label
    parent: Optional[int] = None
    position: int = Field(0, description="Child position under the parent")
    children: Tuple[int, ...] = ()
    depth: int = 0

    @property
    def is_internal(self) -> bool:
        return self.label.kind is LabelKind.RELATION

    @property
    def is_unary(self) -> bool:
        return self.label.kind is LabelKind.UNARY

    @property
    def is_constant(self) -> bool:
        return self.label.kind is LabelKind.CONSTANT

    @property
    def is_bottom(self) -> bool:
        return self.label.kind is LabelKind.BOTTOM

    @property
    def is_variable(self) -> bool:
        return not self.is_constant

    @property
    def ref(self) -> str:
        """Display name: the variable, or the quoted constant."""
        return self.name if self.name is not None else self.label.render()

    def term(self) -> Symbol:
        """The query term this vertex contributes as an atom argument."""
        if self.is_constant:
            return Symbol.const(self.label.name)
        return Symbol.var(self.name)


VertexRef = Union[int, str, Vertex]


class TreeQuery(BaseModel):
    """A rooted tree query.

    Vertices are stored in breadth-first order, so the root has index 0 and
    every parent precedes its children. Internal vertices carry relation
    labels; leaves carry unary, constant or ⊥ labels.
    """

    model_config = ConfigDict(frozen=True)

    vertices: Tuple[Vertex, ...]

    @model_validator(mode='after')
    def check_shape(self) -> 'TreeQuery':
        if not self.vertices:
            raise ValidationError("a tree query has at least one vertex")
        if self.vertices[0].parent is not None:
            raise ValidationError("vertex 0 must be the root")
        names: Set[str] = set()
        arities: Dict[str, int] = {}
        unary: Set[str] = set()
        for i, v in enumerate(self.vertices):
            if v.index != i:
                raise ValidationError(f"vertex {v.ref} stored at {i} but indexed {v.index}")
            if v.is_variable:
                if not v.name:
                    raise ValidationError(f"variable vertex {i} has no name")
                if v.name in names:
                    raise ValidationError(f"vertex name {v.name} used twice")
                names.add(v.name)
            elif v.name is not None:
                raise ValidationError(f"constant vertex {v.ref} cannot carry a variable name")
            if v.is_internal:
                if not v.children:
                    raise ArityError(v.label.name, "relation vertex without children")
                known = arities.setdefault(v.label.name, len(v.children))
                if known != len(v.children):
                    raise ArityError(v.label.name, f"used with {known} and {len(v.children)} children")
            elif v.children:
                raise ValidationError(f"leaf label {v.label} cannot have children")
            if v.is_unary:
                unary.add(v.label.name)
        clash = unary & set(arities)
        if clash:
            raise ArityError(sorted(clash)[0], "used both as unary and as internal label")
        return self

    @classmethod
    def from_sketch(cls, sketch: Sketch, fresh_start: int = 0) -> 'TreeQuery':
        """Index a sketch breadth-first and name its unnamed variable vertices.

        Args:
            sketch: Nested tree
            fresh_start: First k tried for fresh names ``x<k>``

        Returns:
            TreeQuery
        """
        order: List[Tuple[Sketch, Optional[int], int, int]] = []
        queue = deque([(sketch, None, 0, 0)])
        while queue:
            node, parent, position, depth = queue.popleft()
            index = len(order)
            order.append((node, parent, position, depth))
            for i, child in enumerate(node.children):
                queue.append((child, index, i, depth + 1))

        children: Dict[int, List[int]] = {i: [] for i in range(len(order))}
        for i, (_, parent, _, _) in enumerate(order):
            if parent is not None:
                children[parent].append(i)

        used = {node.name for node, *_ in order if node.name}
        counter = fresh_start
        vertices: List[Vertex] = []
        for i, (node, parent, position, depth) in enumerate(order):
            name = node.name
            if node.label.kind is LabelKind.CONSTANT:
                name = None
            elif name is None:
                while f"x{counter}" in used:
                    counter += 1
                name = f"x{counter}"
                used.add(name)
                counter += 1
            vertices.append(Vertex(
                index=i, name=name, label=node.label, parent=parent,
                position=position, children=tuple(children[i]), depth=depth,
            ))
        return cls(vertices=tuple(vertices))

    @classmethod
    def parse(cls, text: str) -> 'TreeQuery':
        from .syntax import parse_tree_query
        return parse_tree_query(text)

    # Lookup

    @property
    def root(self) -> Vertex:
        return self.vertices[0]

    @cached_property
    def name_index(self) -> Dict[str, Vertex]:
        return {v.name: v for v in self.vertices if v.name is not None}

    def resolve(self, ref: VertexRef) -> Vertex:
        """Look a vertex up by index, variable name, or Vertex.

        Raises:
            VertexNotFoundError: If the reference does not resolve
        """
        if isinstance(ref, Vertex):
            ref = ref.index
        if isinstance(ref, int) and not isinstance(ref, bool):
            if 0 <= ref < len(self.vertices):
                return self.vertices[ref]
        elif isinstance(ref, str) and ref in self.name_index:
            return self.name_index[ref]
        raise VertexNotFoundError(ref)

    def __iter__(self) -> Iterator[Vertex]:
        return iter(self.vertices)

    def __len__(self) -> int:
        return len(self.vertices)

    def children(self, ref: VertexRef) -> List[Vertex]:
        return [self.vertices[c] for c in self.resolve(ref).children]

    def internal_vertices(self) -> List[Vertex]:
        return [v for v in self.vertices if v.is_internal]

    def leaves(self) -> List[Vertex]:
        return [v for v in self.vertices if not v.children]

    def same_label(self, x: VertexRef, y: VertexRef) -> bool:
        """Whether both vertices are internal and share their relation label."""
        vx, vy = self.resolve(x), self.resolve(y)
        return vx.is_internal and vy.is_internal and vx.label == vy.label

    # Tree relations

    def ancestors(self, ref: VertexRef) -> List[Vertex]:
        """Strict ancestors, nearest first."""
        v = self.resolve(ref)
        chain = []
        while v.parent is not None:
            v = self.vertices[v.parent]
            chain.append(v)
        return chain

    def is_ancestor(self, x: VertexRef, y: VertexRef) -> bool:
        """Whether x is a strict ancestor of y."""
        vx = self.resolve(x)
        return any(a.index == vx.index for a in self.ancestors(y))

    def incomparable(self, x: VertexRef, y: VertexRef) -> bool:
        vx, vy = self.resolve(x), self.resolve(y)
        return (vx.index != vy.index
                and not self.is_ancestor(vx, vy)
                and not self.is_ancestor(vy, vx))

    def descendants(self, ref: VertexRef) -> List[Vertex]:
        """The vertex and everything below it, in breadth-first order."""
        start = self.resolve(ref)
        found = [start]
        queue = deque([start])
        while queue:
            for child in self.children(queue.popleft()):
                found.append(child)
                queue.append(child)
        return found

    @property
    def depth(self) -> int:
        return max(v.depth for v in self.vertices)

    # Derived queries

    def to_sketch(self, ref: Optional[VertexRef] = None, keep_names: bool = True) -> Sketch:
        v = self.root if ref is None else self.resolve(ref)
        return Sketch(
            label=v.label,
            name=v.name if keep_names else None,
            children=tuple(self.to_sketch(c, keep_names) for c in v.children),
        )

    def subtree(self, ref: VertexRef) -> 'TreeQuery':
        """q|x: the subquery rooted at x, keeping variable names."""
        return TreeQuery.from_sketch(self.to_sketch(ref))

    @property
    def max_fresh_index(self) -> int:
        """Largest k among names ``x<k>`` (-1 when there is none)."""
        found = [int(m.group(1)) for name in self.name_index if (m := _FRESH_NAME.match(name))]
        return max(found, default=-1)

    # Schema

    def relations(self) -> Dict[str, int]:
        """Relation label to child count, for internal labels."""
        return {v.label.name: len(v.children) for v in self.vertices if v.is_internal}

    def unary_relations(self) -> List[str]:
        return sorted({v.label.name for v in self.vertices if v.is_unary})

    def constants(self) -> List[str]:
        return sorted({v.label.name for v in self.vertices if v.is_constant})

    def variables(self) -> List[str]:
        return [v.name for v in self.vertices if v.is_variable]

    @property
    def is_selfjoinfree(self) -> bool:
        labels = [v.label.name for v in self.vertices if v.is_internal or v.is_unary]
        return len(labels) == len(set(labels))

    # Rendering

    def to_string(self, ref: Optional[VertexRef] = None) -> str:
        """Whitespace-normal string representation (no variable names)."""
        v = self.root if ref is None else self.resolve(ref)
        if not v.children:
            return v.label.render()
        inner = ",".join(self.to_string(c) for c in v.children)
        return f"{v.label.name}({inner})"

    def __str__(self) -> str:
        return self.to_string()

    def describe(self) -> str:
        """Rendering with every variable vertex annotated by its name."""
        def walk(v: Vertex) -> str:
            head = v.label.render() if v.is_constant else f"{v.name}:{v.label.render()}"
            if not v.children:
                return head
            return f"{head}(" + ", ".join(walk(self.vertices[c]) for c in v.children) + ")"
        return walk(self.root)

    def atom_of(self, ref: VertexRef) -> Optional[Atom]:
        """The atom keyed by a vertex, None for constant and ⊥ leaves.

        Internal R-vertex u with children v1..vn gives R(u; v1..vn), a unary
        leaf L at u gives L(u;).
        """
        v = self.resolve(ref)
        if v.is_internal:
            args = (v.term(),) + tuple(self.vertices[c].term() for c in v.children)
            return Atom(relation=v.label.name, key_arity=1, args=args)
        if v.is_unary:
            return Atom(relation=v.label.name, key_arity=1, args=(v.term(),))
        return None

    def atoms_of(self, refs: Iterable[VertexRef]) -> List[Atom]:
        """Atoms keyed by the given vertices, in breadth-first order."""
        indices = sorted({self.resolve(r).index for r in refs})
        return [a for a in (self.atom_of(i) for i in indices) if a is not None]

    def to_graph(self) -> GraphQuery:
        """The atom set this tree represents."""
        atoms = self.atoms_of(range(len(self.vertices)))
        if not atoms:
            raise ValidationError(f"{self.to_string()} has no atoms")
        return GraphQuery(atoms=tuple(atoms))


def tree_to_graph(q: TreeQuery) -> GraphQuery:
    return q.to_graph()
