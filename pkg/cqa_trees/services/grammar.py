"""The context-free grammar of a tree query and its membership tests."""

from collections import deque
from itertools import product
from typing import Dict, FrozenSet, List, Set, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from ..core.exceptions import ArityError
from ..core.logging import get_logger
from ..models import Database, Sketch, TreeQuery, VertexRef, tree_sketch

logger = get_logger('cqa_trees.services.grammar')

Pair = Tuple[str, int]


class TreeCFG(BaseModel):
    """Grammar with one nonterminal S_v per vertex v of the query.

    Forward rules rebuild the query's own atoms, backward rules let a vertex
    continue as any strict ancestor with the same relation label, and leaf
    rules emit unary labels, constants or ⊥.
    """

    model_config = ConfigDict(frozen=True)

    query: TreeQuery
    backward: Dict[int, Tuple[int, ...]] = Field(..., description="Vertex to its same-label strict ancestors")

    @property
    def start(self) -> int:
        return self.query.root.index

    def backward_rules(self) -> List[Tuple[int, int]]:
        return [(y, x) for y, xs in sorted(self.backward.items()) for x in xs]

    def rules(self) -> List[str]:
        """Every production, rendered with vertex names."""
        q = self.query
        def name(i: int) -> str:
            return f"S_{q.vertices[i].ref}"

        lines = []
        for v in q.vertices:
            if v.is_internal:
                lines.append(f"{name(v.index)} -> {v.label.name}(" + ", ".join(name(c) for c in v.children) + ")")
            else:
                lines.append(f"{name(v.index)} -> {v.label.render()}")
        lines.extend(f"{name(y)} -> {name(x)}" for y, x in self.backward_rules())
        return lines


def build_cfg(q: TreeQuery) -> TreeCFG:
    """TreeCFG(q): backward rules from every vertex to its same-label strict ancestors."""
    backward = {
        v.index: tuple(a.index for a in q.ancestors(v) if a.is_internal and a.label == v.label)
        for v in q.internal_vertices()
    }
    return TreeCFG(query=q, backward={y: xs for y, xs in backward.items() if xs})


def _check_schema(q: TreeQuery, tau: TreeQuery):
    relations = q.relations()
    unary = set(q.unary_relations())
    for v in tau.vertices:
        name = v.label.name
        if v.is_internal:
            if name in unary:
                raise ArityError(name, "unary in the query but internal in the tree")
            if name in relations and relations[name] != len(v.children):
                raise ArityError(name, f"{relations[name]} children in the query, {len(v.children)} in the tree")
        elif v.is_unary and name in relations:
            raise ArityError(name, "internal in the query but unary in the tree")


def derives(g: TreeCFG, start: VertexRef, tau: Union[Sketch, TreeQuery, str]) -> bool:
    """Whether S_start derives the string of ``tau``.

    Raises:
        ArityError: If tau uses a relation of the query with another shape
    """
    q = g.query
    if isinstance(tau, str):
        tau = tree_sketch(tau)
    tree = tau if isinstance(tau, TreeQuery) else TreeQuery.from_sketch(tau)
    _check_schema(q, tree)
    memo: Dict[Tuple[int, int], bool] = {}

    def accept(u: int, t: int) -> bool:
        key = (u, t)
        if key in memo:
            return memo[key]
        qu, tv = q.vertices[u], tree.vertices[t]
        if qu.is_internal:
            result = (
                tv.is_internal
                and tv.label == qu.label
                and len(tv.children) == len(qu.children)
                and all(accept(a, b) for a, b in zip(qu.children, tv.children))
            ) or any(accept(x, t) for x in g.backward.get(u, ()))
        else:
            result = tv.label == qu.label
        memo[key] = result
        return result

    return accept(q.resolve(start).index, 0)


def accepted_pairs(g: TreeCFG, r: Database) -> Set[Pair]:
    """All (c, v) such that some rooted tree set in r starting at c is derived by S_v.

    Only ⊥ vertices accept constants outside adom(r); those pairs are left
    implicit. Requires a consistent instance.

    Raises:
        InconsistentDatabaseError: If r has a block with two facts
    """
    r.require_consistent('accepts_in_consistent')
    q = g.query

    # (relation, position, value) -> keys of facts with that value at that position
    uses: Dict[Tuple[str, int, str], List[str]] = {}
    for f in r.facts:
        if len(f.key) != 1:
            continue
        for i, d in enumerate(f.values):
            uses.setdefault((f.relation, i, d), []).append(f.key[0])

    forward_dependents: Dict[int, List[int]] = {}
    for y, xs in g.backward.items():
        for x in xs:
            forward_dependents.setdefault(x, []).append(y)

    acc: Set[Pair] = set()
    work: deque = deque()

    def add(pair: Pair):
        if pair not in acc:
            acc.add(pair)
            work.append(pair)

    for v in q.vertices:
        if v.is_bottom:
            for c in r.adom:
                add((c, v.index))
        elif v.is_constant:
            add((v.label.name, v.index))
        elif v.is_unary:
            for f in r.facts:
                if f.relation == v.label.name and len(f.key) == 1 and not f.values:
                    add((f.key[0], v.index))

    def holds(c: str, y: int) -> bool:
        vy = q.vertices[y]
        if any((c, x) in acc for x in g.backward.get(y, ())):
            return True
        block = r.block(vy.label.name, (c,))
        if not block:
            return False
        f = block[0]
        return len(f.values) == len(vy.children) and all(
            (d, child) in acc for d, child in zip(f.values, vy.children)
        )

    while work:
        d, v = work.popleft()
        vv = q.vertices[v]
        if vv.parent is not None:
            parent = q.vertices[vv.parent]
            for c in uses.get((parent.label.name, vv.position, d), []):
                if (c, parent.index) not in acc and holds(c, parent.index):
                    add((c, parent.index))
        for y in forward_dependents.get(v, []):
            if (d, y) not in acc and holds(d, y):
                add((d, y))
    logger.debug("Acceptance fixpoint done", pairs=len(acc))
    return acc


def accepts_in_consistent(g: TreeCFG, u: VertexRef, c: str, r: Database) -> bool:
    """Whether some rooted tree set in the consistent instance r starting at c is derived by S_u."""
    vertex = g.query.resolve(u)
    if vertex.is_bottom:
        r.require_consistent('accepts_in_consistent')
        return True
    return (c, vertex.index) in accepted_pairs(g, r)


def accepted_constants(g: TreeCFG, u: VertexRef, r: Database) -> FrozenSet[str]:
    """Constants of adom(r) from which S_u derives a rooted tree set of r."""
    index = g.query.resolve(u).index
    return frozenset(c for c, v in accepted_pairs(g, r) if v == index and c in r.adom)


def render_sketch(s: Sketch) -> str:
    if not s.children:
        return s.label.render()
    return f"{s.label.name}(" + ",".join(render_sketch(c) for c in s.children) + ")"


def enumerate_derivations(g: TreeCFG, start: VertexRef, max_backward: int) -> List[Sketch]:
    """Every tree S_start derives with at most ``max_backward`` backward steps.

    Trees are returned once each, ordered by their string.
    """
    q = g.query
    memo: Dict[Tuple[int, int], Dict[str, Tuple[Sketch, int]]] = {}

    def gen(u: int, budget: int) -> Dict[str, Tuple[Sketch, int]]:
        key = (u, budget)
        if key in memo:
            return memo[key]
        v = q.vertices[u]
        found: Dict[str, Tuple[Sketch, int]] = {}

        def keep(s: Sketch, cost: int):
            text = render_sketch(s)
            if text not in found or found[text][1] > cost:
                found[text] = (s, cost)

        if not v.is_internal:
            keep(Sketch(label=v.label), 0)
        else:
            options = [list(gen(c, budget).values()) for c in v.children]
            for combo in product(*options):
                cost = sum(c for _, c in combo)
                if cost <= budget:
                    keep(Sketch(label=v.label, children=tuple(s for s, _ in combo)), cost)
            if budget > 0:
                for x in g.backward.get(u, ()):
                    for s, cost in gen(x, budget - 1).values():
                        keep(s, cost + 1)
        memo[key] = found
        return found

    trees = gen(q.resolve(start).index, max_backward)
    return [s for _, (s, _) in sorted(trees.items())]


__all__ = [
    'TreeCFG',
    'build_cfg',
    'derives',
    'accepted_pairs',
    'accepts_in_consistent',
    'accepted_constants',
    'enumerate_derivations',
    'render_sketch',
]
