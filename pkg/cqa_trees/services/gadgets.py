"""Instance generators: hardness reductions and named sample instances."""

import functools
import itertools
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Set, Tuple, Union

import networkx as nx
from lark import Lark, Transformer
from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from ..core.exceptions import (
    NotMinimalError,
    ParseError,
    ValidationError,
    WitnessPairError,
    translate_parse_errors,
)
from ..core.logging import get_logger, with_logging
from ..models import Database, Fact, GraphQuery, TreeQuery, VertexRef, fact
from .classification import connected_components, maps_into_rewind, same_label_pairs
from .homomorphism import TreeMatcher, is_minimal

logger = get_logger('cqa_trees.services.gadgets')

CNF_GRAMMAR = r"""
    start: clause ("&" clause)*
    clause: "(" literal ("|" literal)* ")"
          | literal
    literal: NEGATION? NAME
    NEGATION: "~"
    NAME: /[A-Za-z0-9_.+\-]+/

    %import common.WS
    %ignore WS
"""

EDGE_GRAMMAR = r"""
    start: (edge ("," edge)*)?
    edge: NAME ">" NAME
    NAME: /[^\s,>]+/

    %import common.WS
    %ignore WS
"""

_cnf_parser = Lark(CNF_GRAMMAR, parser='lalr')
_edge_parser = Lark(EDGE_GRAMMAR, parser='lalr')


class Clause(BaseModel):
    """A monotone clause: all literals positive or all negative."""

    model_config = ConfigDict(frozen=True)

    positive: bool
    literals: Tuple[str, ...]

    @field_validator('literals')
    @classmethod
    def non_empty(cls, v: Tuple[str, ...]) -> Tuple[str, ...]:
        if not v:
            raise ValueError("a clause has at least one literal")
        return v

    def satisfied_by(self, assignment: Mapping[str, bool]) -> bool:
        return any(assignment[z] == self.positive for z in self.literals)

    def render(self) -> str:
        sign = "" if self.positive else "~"
        return "(" + "|".join(sign + z for z in self.literals) + ")"


class MonotoneCNF(BaseModel):
    """Conjunction of monotone clauses over named variables."""

    model_config = ConfigDict(frozen=True)

    variables: Tuple[str, ...]
    clauses: Tuple[Clause, ...]

    @model_validator(mode='after')
    def check_variables(self) -> 'MonotoneCNF':
        unknown = {z for c in self.clauses for z in c.literals} - set(self.variables)
        if unknown:
            raise ValueError(f"clauses use undeclared variables {sorted(unknown)}")
        return self

    @classmethod
    def of(cls, clauses: Iterable[Clause]) -> 'MonotoneCNF':
        clauses = tuple(clauses)
        variables = sorted({z for c in clauses for z in c.literals})
        return cls(variables=tuple(variables), clauses=clauses)

    @classmethod
    def parse(cls, text: str) -> 'MonotoneCNF':
        """Parse ``(x1|x2)&(~x1|~x2)``; ``~`` negates.

        Raises:
            ParseError: On syntax errors or a clause mixing polarities
        """
        return _parse_cnf(text)

    def assignments(self) -> Iterable[Dict[str, bool]]:
        for values in itertools.product((False, True), repeat=len(self.variables)):
            yield dict(zip(self.variables, values))

    def satisfying_assignment(self) -> Optional[Dict[str, bool]]:
        """First satisfying assignment in truth-table order."""
        for assignment in self.assignments():
            if all(c.satisfied_by(assignment) for c in self.clauses):
                return assignment
        return None

    def satisfiable(self) -> bool:
        return self.satisfying_assignment() is not None

    def render(self) -> str:
        return "&".join(c.render() for c in self.clauses)


class _CNFTransformer(Transformer):
    def literal(self, items) -> Tuple[bool, str]:
        return len(items) == 1, str(items[-1])

    def clause(self, items) -> Clause:
        polarities = {positive for positive, _ in items}
        if len(polarities) != 1:
            raise ParseError("clause mixes positive and negative literals")
        return Clause(positive=polarities.pop(), literals=tuple(z for _, z in items))

    def start(self, items) -> MonotoneCNF:
        return MonotoneCNF.of(items)


@translate_parse_errors(what="CNF formula")
def _parse_cnf(text: str) -> MonotoneCNF:
    return _CNFTransformer().transform(_cnf_parser.parse(text))


class Digraph(BaseModel):
    """Directed graph with a designated source and target."""

    model_config = ConfigDict(frozen=True)

    vertices: Tuple[str, ...]
    edges: Tuple[Tuple[str, str], ...] = ()
    source: str
    target: str

    @model_validator(mode='after')
    def check_endpoints(self) -> 'Digraph':
        known = set(self.vertices)
        missing = ({self.source, self.target} | {v for e in self.edges for v in e}) - known
        if missing:
            raise ValueError(f"unknown vertices {sorted(missing)}")
        return self

    @classmethod
    def of(cls, edges: Iterable[Tuple[str, str]], source: str, target: str,
           vertices: Iterable[str] = ()) -> 'Digraph':
        edges = tuple(dict.fromkeys(tuple(e) for e in edges))
        names = dict.fromkeys([source, target, *vertices, *(v for e in edges for v in e)])
        return cls(vertices=tuple(names), edges=edges, source=source, target=target)

    @classmethod
    def parse(cls, text: str, source: str = 's', target: str = 't') -> 'Digraph':
        """Parse ``s>a,a>t``; source and target are added when absent."""
        return cls.of(_parse_edges(text), source=source, target=target)

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.vertices)
        graph.add_edges_from(self.edges)
        return graph

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.to_networkx())

    def reachable(self) -> bool:
        """Whether a directed path leads from source to target."""
        return nx.has_path(self.to_networkx(), self.source, self.target)


class _EdgeTransformer(Transformer):
    def edge(self, items) -> Tuple[str, str]:
        return str(items[0]), str(items[1])

    def start(self, items) -> List[Tuple[str, str]]:
        return list(items)


@translate_parse_errors(what="edge list")
def _parse_edges(text: str) -> List[Tuple[str, str]]:
    return _EdgeTransformer().transform(_edge_parser.parse(text))


class FreshConstants:
    """Deterministic constant names ``g.<gadget>.<part>.<n>``."""

    def __init__(self, gadget: str):
        self.gadget = gadget
        self._counters: Dict[str, int] = {}

    def __call__(self, part: str) -> str:
        n = self._counters.get(part, 0)
        self._counters[part] = n + 1
        return f"g.{self.gadget}.{part}.{n}"

    def scope(self, part: str) -> Callable[[], str]:
        """Zero-argument generator drawing from one part's counter."""
        return functools.partial(self, part)


def canonical_copy(
    q: Union[GraphQuery, TreeQuery],
    bindings: Mapping[str, str],
    fresh: Callable[[], str],
) -> FrozenSet[Fact]:
    """q[x̄ → c̄]: bind the listed variables, every other variable to a fresh constant.

    Constants of q map to themselves.

    Raises:
        ValidationError: If a bound variable is not in q, or the bound
            constants repeat or collide with a constant of q
    """
    if isinstance(q, TreeQuery):
        q = q.to_graph()
    variables = q.variables()
    unknown = sorted(set(bindings) - set(variables))
    if unknown:
        raise ValidationError(f"cannot bind {unknown}: not variables of {q.render()}")
    values = list(bindings.values())
    if len(set(values)) != len(values):
        raise ValidationError(f"bound constants must be distinct, got {values}")
    clash = sorted(set(values) & set(q.constants()))
    if clash:
        raise ValidationError(f"bound constants {clash} collide with constants of {q.render()}")

    valuation = {z: bindings[z] if z in bindings else fresh() for z in variables}

    def value(t) -> str:
        return valuation[t.name] if t.is_variable else t.name

    return frozenset(
        Fact(relation=a.relation, key=tuple(value(t) for t in a.key), values=tuple(value(t) for t in a.values))
        for a in q.atoms
    )


def _piece(q: TreeQuery, keep: Iterable[int]) -> Optional[GraphQuery]:
    atoms = q.atoms_of(keep)
    return GraphQuery(atoms=tuple(atoms)) if atoms else None


def _below(q: TreeQuery, ref: VertexRef) -> Set[int]:
    return {v.index for v in q.descendants(ref)}


def _copy(piece: Optional[GraphQuery], bindings: Mapping[str, str], fresh: Callable[[], str]) -> FrozenSet[Fact]:
    if piece is None:
        return frozenset()
    return canonical_copy(piece, {k: v for k, v in bindings.items() if k in piece.variables()}, fresh)


def violates_c2(q: TreeQuery, p: VertexRef, n: VertexRef) -> bool:
    """Whether q maps into neither q[p←n] nor q[n←p]."""
    return not (maps_into_rewind(q, p, n, False) or maps_into_rewind(q, n, p, False))


@with_logging
def sat_gadget(
    q: TreeQuery,
    phi: MonotoneCNF,
    p: Optional[VertexRef] = None,
    n: Optional[VertexRef] = None,
) -> Database:
    """Instance whose repairs all satisfy q iff phi is unsatisfiable.

    Variables z choose between q|p and q|n rooted at z; a positive clause C
    offers (q minus q|p) with the root at C and p at z for each of its
    literals, a negative clause the same with n.

    Raises:
        WitnessPairError: If (p, n) does not violate C2, or q has no such pair
    """
    if p is None or n is None:
        found = next(((x, y) for x, y in same_label_pairs(q) if violates_c2(q, x, y)), None)
        if found is None:
            raise WitnessPairError('sat_gadget', f"{q.to_string()} satisfies C2")
        vp, vn = found
    else:
        vp, vn = q.resolve(p), q.resolve(n)
        if not q.same_label(vp, vn) or vp.index == vn.index or not violates_c2(q, vp, vn):
            raise WitnessPairError('sat_gadget', f"({vp.ref}, {vn.ref}) does not violate C2")

    root = q.root.name
    names = FreshConstants('sat')
    everything = set(range(len(q)))
    p_tree, n_tree = _piece(q, _below(q, vp)), _piece(q, _below(q, vn))
    p_rest, n_rest = _piece(q, everything - _below(q, vp)), _piece(q, everything - _below(q, vn))

    facts: Set[Fact] = set()
    for z in phi.variables:
        facts |= _copy(p_tree, {vp.name: z}, names.scope(f"{z}.p"))
        facts |= _copy(n_tree, {vn.name: z}, names.scope(f"{z}.n"))
    for i, clause in enumerate(phi.clauses):
        key = f"g.sat.clause.{i}"
        rest, pinned = (p_rest, vp) if clause.positive else (n_rest, vn)
        for j, z in enumerate(clause.literals):
            facts |= _copy(rest, {root: key, pinned.name: z}, names.scope(f"c{i}.l{j}"))

    db = Database(facts=frozenset(facts))
    logger.info("Generated SAT gadget", p=vp.name, n=vn.name, formula=phi.render(), **db.summary())
    return db


def _prefix_violation(matcher: TreeMatcher, x: int, y: int) -> bool:
    return not matcher.feasible(y, x)


def normalize_reach_pair(q: TreeQuery, x: VertexRef, y: VertexRef) -> Tuple[int, int]:
    """Lowest consecutive same-label ancestor pair without a root hom q|y → q|x.

    The returned pair also has q|z → q|y rooted at z for every same-label
    z strictly below y.

    Raises:
        WitnessPairError: If (x, y) is not a violating ancestor pair or no
            pair below it meets the conditions
    """
    vx, vy = q.resolve(x), q.resolve(y)
    matcher = TreeMatcher(q, q)
    if not q.same_label(vx, vy) or not q.is_ancestor(vx, vy) or not _prefix_violation(matcher, vx.index, vy.index):
        raise WitnessPairError('reach_gadget', f"({vx.ref}, {vy.ref}) is not an ancestor pair without a root homomorphism")

    same = [v for v in q.internal_vertices() if v.label == vx.label]
    consecutive: List[Tuple[int, int]] = []
    for v in same:
        parent = next((a for a in q.ancestors(v) if a.label == v.label), None)
        if parent is not None and _prefix_violation(matcher, parent.index, v.index):
            consecutive.append((parent.index, v.index))
    if not consecutive:
        raise WitnessPairError('reach_gadget', "no consecutive violating pair")
    low_x, low_y = max(consecutive, key=lambda pair: (q.vertices[pair[1]].depth, -pair[1]))
    for z in same:
        if q.is_ancestor(low_y, z) and not matcher.feasible(z.index, low_y):
            raise WitnessPairError(
                'reach_gadget',
                f"{z.ref} below {q.vertices[low_y].ref} has no root homomorphism into it",
            )
    return low_x, low_y


def first_reach_pair(q: TreeQuery) -> Tuple[int, int]:
    """First same-label ancestor pair lacking the root homomorphism, normalized."""
    matcher = TreeMatcher(q, q)
    for x, y in same_label_pairs(q):
        if q.is_ancestor(x, y) and _prefix_violation(matcher, x.index, y.index):
            return normalize_reach_pair(q, x, y)
    raise WitnessPairError('reach_gadget', f"{q.to_string()} has no ancestor pair without a root homomorphism")


@with_logging
def reach_gadget(
    q: TreeQuery,
    g: Digraph,
    x: Optional[VertexRef] = None,
    y: Optional[VertexRef] = None,
) -> Database:
    """Instance with a falsifying repair iff g has a path from source to target.

    Raises:
        ValidationError: If g has a cycle
        WitnessPairError: If the witness pair cannot be normalized
    """
    if not g.is_acyclic():
        raise ValidationError(f"reach_gadget needs an acyclic graph, got edges {list(g.edges)}")
    ix, iy = first_reach_pair(q) if x is None or y is None else normalize_reach_pair(q, x, y)
    vx, vy = q.vertices[ix], q.vertices[iy]

    names = FreshConstants('reach')
    start, end = names('terminal'), names('terminal')
    everything = set(range(len(q)))
    above = _piece(q, everything - _below(q, ix))
    between = _piece(q, _below(q, ix) - _below(q, iy))
    below = _piece(q, _below(q, iy))

    facts: Set[Fact] = set()
    for u in (*g.vertices, start):
        facts |= _copy(above, {vx.name: u}, names.scope(f"above.{u}"))
    for u, v in (*g.edges, (start, g.source), (g.target, end)):
        facts |= _copy(between, {vx.name: u, vy.name: v}, names.scope(f"edge.{u}.{v}"))
    for u in g.vertices:
        facts |= _copy(below, {vy.name: u}, names.scope(f"below.{u}"))

    db = Database(facts=frozenset(facts))
    logger.info("Generated reachability gadget", x=vx.name, y=vy.name, edges=len(g.edges), **db.summary())
    return db


def encode_pair(constant: str, term: str) -> str:
    return f"{constant}@{term}"


@with_logging
def sjf_lift(q: GraphQuery, sjf_db: Database) -> Database:
    """Lift an instance of sjf(q) to an instance of q.

    A fact N(f1..fn) of the renamed atom N(α1..αn) becomes a fact of the
    original relation with arguments ``f_i@α_i``.
    Constants of q are tagged like variables, so lifted facts never
    match them; lift constant-free queries only.

    Raises:
        NotMinimalError: If q is not a core
        ValidationError: If sjf_db uses a relation or arity sjf(q) lacks
    """
    if not is_minimal(q):
        raise NotMinimalError('sjf_lift', f"{q.render()} is not minimal")
    _, correspondence = q.self_join_free()
    lifted: Set[Fact] = set()
    for f in sjf_db.sorted_facts:
        original = correspondence.get(f.relation)
        if original is None or f.shape != (original.arity, original.key_arity):
            raise ValidationError(f"{f.render()} does not match an atom of the self-join-free query")
        args = [encode_pair(c, t.name) for c, t in zip(f.args, original.args)]
        lifted.add(Fact(relation=original.relation, key=tuple(args[:original.key_arity]),
                        values=tuple(args[original.key_arity:])))
    return Database(facts=frozenset(lifted))


def lift_component_instance(q: GraphQuery, i: int, db: Database) -> Database:
    """db plus canonical copies of every component of q other than the i-th.

    CQA of the i-th component on db then agrees with CQA of q on the result.

    Raises:
        NotMinimalError: If q is not a core
        ValidationError: If i is not a component index
    """
    if not is_minimal(q):
        raise NotMinimalError('lift_component_instance', f"{q.render()} is not minimal")
    components = connected_components(q)
    if not 0 <= i < len(components):
        raise ValidationError(f"component {i} out of range, query has {len(components)}")
    names = FreshConstants('lift')
    facts: Set[Fact] = set(db.facts)
    for j, component in enumerate(components):
        if j != i:
            facts |= canonical_copy(component, {}, names.scope(f"component.{j}"))
    return Database(facts=frozenset(facts))


SAMPLE_QUERY = "C(R(A,B),R(B,A))"

_SAMPLE_FACTS = (
    (fact('C', 'c1', 'x1', 'z-'), True),
    (fact('C', 'c1', 'x2', 'z-'), False),
    (fact('C', 'c2', 'z+', 'x1'), False),
    (fact('C', 'c2', 'z+', 'x2'), True),
    (fact('R', 'x1', 'a', 'b'), False),
    (fact('R', 'x1', 'b', 'a'), True),
    (fact('R', 'x2', 'a', 'b'), True),
    (fact('R', 'x2', 'b', 'a'), False),
    (fact('R', 'z+', 'a', 'b'), True),
    (fact('R', 'z-', 'b', 'a'), True),
    (fact('A', 'a'), True),
    (fact('B', 'b'), True),
)


def fig5_instance() -> Tuple[TreeQuery, Database]:
    """C(R(A,B),R(B,A)) and its twelve-fact instance encoding (x1|x2)&(~x1|~x2).

    The instance has sixteen repairs and one of them falsifies the query.
    """
    return TreeQuery.parse(SAMPLE_QUERY), Database(facts=frozenset(f for f, _ in _SAMPLE_FACTS))


def satisfiable_sample_repair() -> Database:
    """The falsifying repair of the sample, for the assignment x1 = 1, x2 = 0."""
    return Database(facts=frozenset(f for f, marked in _SAMPLE_FACTS if marked))


__all__ = [
    'Clause',
    'MonotoneCNF',
    'Digraph',
    'FreshConstants',
    'canonical_copy',
    'violates_c2',
    'sat_gadget',
    'normalize_reach_pair',
    'first_reach_pair',
    'reach_gadget',
    'encode_pair',
    'sjf_lift',
    'lift_component_instance',
    'SAMPLE_QUERY',
    'fig5_instance',
    'satisfiable_sample_repair',
]
