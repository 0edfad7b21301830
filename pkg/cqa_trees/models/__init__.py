"""Model initialization."""

from .symbols import Symbol, SymbolKind
from .graph_query import Atom, GraphQuery
from .tree_query import Label, LabelKind, Sketch, TreeQuery, Vertex, VertexRef, tree_to_graph
from .database import BlockId, Database, Fact, fact, render_constant
from .syntax import (
    parse_database,
    parse_graph_query,
    parse_tree_query,
    serialize_tree_query,
    tree_sketch,
)

__all__ = [
    'Symbol',
    'SymbolKind',
    'Atom',
    'GraphQuery',
    'Label',
    'LabelKind',
    'Sketch',
    'TreeQuery',
    'Vertex',
    'VertexRef',
    'tree_to_graph',
    'BlockId',
    'Database',
    'Fact',
    'fact',
    'render_constant',
    'parse_database',
    'parse_graph_query',
    'parse_tree_query',
    'serialize_tree_query',
    'tree_sketch',
]
