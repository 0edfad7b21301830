"""Concrete syntaxes for tree queries, graph queries and fact files.

Tree queries::

    A(R(R(U,_),X('c1')),R(Y(_),Z('c2',_)))

Relation names start with an uppercase letter, constants are single-quoted
and ``_`` is the empty tree ⊥.

Graph queries list atoms with the key left of ``;``::

    R(x; y, z), R(z; x, y)

Fact files hold one fact per line, ``#`` starts a comment::

    R(a; b)
    A(c)        # same as A(c;)
"""

from typing import Dict, List, Optional, Tuple

from lark import Lark, Token, Transformer, v_args

from ..core.exceptions import ArityError, ParseError, translate_parse_errors
from ..core.logging import get_logger
from .database import Database, Fact
from .graph_query import Atom, GraphQuery
from .symbols import Symbol
from .tree_query import Label, LabelKind, Sketch, TreeQuery, tree_to_graph

logger = get_logger('cqa_trees.models.syntax')

TREE_GRAMMAR = r"""
?start: tree

?tree: RELNAME "(" tree ("," tree)* ")"   -> relation
     | RELNAME                             -> unary
     | QUOTED                              -> constant
     | "_"                                 -> bottom

RELNAME: /[A-Z][A-Za-z0-9_]*/
QUOTED: /'[^'\n]+'/

%import common.WS
%ignore WS
"""

GRAPH_GRAMMAR = r"""
start: atom ("," atom)*

atom: RELNAME "(" args ";" args? ")"   -> keyed_atom
    | RELNAME "(" args ")"              -> plain_atom

args: term ("," term)*

?term: VAR      -> variable
     | QUOTED   -> constant

RELNAME: /[A-Z][A-Za-z0-9_]*/
VAR: /[a-z][A-Za-z0-9_]*/
QUOTED: /'[^'\n]+'/

%import common.WS
%ignore WS
"""

FACT_GRAMMAR = r"""
start: (fact? _NL)*

fact: RELNAME "(" values ";" values? ")"   -> keyed_fact
    | RELNAME "(" values ")"                -> plain_fact

values: value ("," value)*

?value: BARE     -> bare
      | QUOTED   -> quoted

RELNAME: /[A-Za-z_][A-Za-z0-9_]*/
BARE: /[^\s,;()'#]+/
QUOTED: /'[^'\n]+'/
COMMENT: /#[^\n]*/
_NL: /\r?\n/

%ignore /[ \t\f]+/
%ignore COMMENT
"""

_tree_parser = Lark(TREE_GRAMMAR, parser='lalr')
_graph_parser = Lark(GRAPH_GRAMMAR, parser='lalr')
_fact_parser = Lark(FACT_GRAMMAR, parser='lalr', propagate_positions=True)


def _unquote(token: Token) -> str:
    return str(token)[1:-1]


class TreeTransformer(Transformer):
    """Builds a Sketch from a tree-query parse tree."""

    def relation(self, items) -> Sketch:
        name, *children = items
        return Sketch(label=Label.relation(str(name)), children=tuple(children))

    def unary(self, items) -> Sketch:
        return Sketch(label=Label.unary(str(items[0])))

    def constant(self, items) -> Sketch:
        return Sketch(label=Label.constant(_unquote(items[0])))

    def bottom(self, items) -> Sketch:
        return Sketch(label=Label.bottom())


class GraphTransformer(Transformer):
    """Builds a GraphQuery from an atom list."""

    def variable(self, items) -> Symbol:
        return Symbol.var(str(items[0]))

    def constant(self, items) -> Symbol:
        return Symbol.const(_unquote(items[0]))

    def args(self, items) -> Tuple[Symbol, ...]:
        return tuple(items)

    def keyed_atom(self, items) -> Atom:
        name, key, *rest = items
        values = rest[0] if rest and rest[0] is not None else ()
        return Atom(relation=str(name), key_arity=len(key), args=key + values)

    def plain_atom(self, items) -> Atom:
        name, key = items
        return Atom(relation=str(name), key_arity=len(key), args=key)

    def start(self, items) -> GraphQuery:
        return GraphQuery(atoms=tuple(items))


@v_args(meta=True)
class FactTransformer(Transformer):
    """Builds a Database, checking each relation's shape line by line."""

    def __init__(self):
        super().__init__()
        self._shapes: Dict[str, Tuple[Tuple[int, int], int]] = {}

    def bare(self, meta, items) -> str:
        return str(items[0])

    def quoted(self, meta, items) -> str:
        return _unquote(items[0])

    def values(self, meta, items) -> Tuple[str, ...]:
        return tuple(items)

    def _check(self, meta, f: Fact) -> Fact:
        first = self._shapes.setdefault(f.relation, (f.shape, meta.line))
        if first[0] != f.shape:
            raise ArityError(
                f.relation,
                f"arity/key arity {f.shape} differs from {first[0]} on line {first[1]}",
                line=meta.line,
            )
        return f

    def keyed_fact(self, meta, items) -> Fact:
        name, key, *rest = items
        values = rest[0] if rest and rest[0] is not None else ()
        return self._check(meta, Fact(relation=str(name), key=key, values=values))

    def plain_fact(self, meta, items) -> Fact:
        name, key = items
        return self._check(meta, Fact(relation=str(name), key=key))

    def start(self, meta, items) -> Database:
        return Database(facts=frozenset(f for f in items if isinstance(f, Fact)))


@translate_parse_errors(what="tree query")
def parse_tree_query(text: str) -> TreeQuery:
    """Parse the string representation of a rooted tree query.

    Vertex names x0, x1, ... are assigned breadth-first, skipping constants.

    Raises:
        ParseError: On syntax errors or a ⊥/constant root
        ArityError: On inconsistent use of a relation name
    """
    sketch = TreeTransformer().transform(_tree_parser.parse(text))
    if sketch.label.kind in (LabelKind.BOTTOM, LabelKind.CONSTANT):
        raise ParseError(
            f"root must be a relation or unary vertex, got {sketch.label.render()}",
            line=1, column=1,
        )
    query = TreeQuery.from_sketch(sketch)
    logger.debug("Parsed tree query", query=query.to_string(), vertices=len(query))
    return query


@translate_parse_errors(what="graph query")
def parse_graph_query(text: str) -> GraphQuery:
    """Parse a comma-separated atom list such as ``R(x; y), S(y; 'c')``."""
    return GraphTransformer().transform(_graph_parser.parse(text))


@translate_parse_errors(what="fact file")
def parse_database(text: str) -> Database:
    """Parse a fact file; duplicate facts collapse.

    Raises:
        ParseError: On syntax errors, with the line number
        ArityError: When a relation changes arity or key arity
    """
    if not text.endswith("\n"):
        text += "\n"
    db = FactTransformer().transform(_fact_parser.parse(text))
    logger.debug("Parsed database", facts=len(db), blocks=len(db.blocks))
    return db


def serialize_tree_query(q: TreeQuery) -> str:
    return q.to_string()


def tree_sketch(text: str) -> Sketch:
    """Parse tree syntax into a Sketch without checking the root."""
    return _parse_sketch(text)


@translate_parse_errors(what="tree")
def _parse_sketch(text: str) -> Sketch:
    return TreeTransformer().transform(_tree_parser.parse(text))


__all__ = [
    'parse_tree_query',
    'parse_graph_query',
    'parse_database',
    'serialize_tree_query',
    'tree_sketch',
    'tree_to_graph',
]
