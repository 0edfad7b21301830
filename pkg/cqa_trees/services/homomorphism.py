"""Homomorphisms between tree queries and between conjunctive queries."""

from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..core.logging import get_logger
from ..core.metrics import HOM_CHECKS
from ..models import Atom, GraphQuery, Symbol, TreeQuery, Vertex, VertexRef

logger = get_logger('cqa_trees.services.homomorphism')


class TreeHomWitness(BaseModel):
    """Vertex map of a tree homomorphism, by breadth-first index."""

    model_config = ConfigDict(frozen=True)

    mapping: Dict[int, int] = Field(..., description="Vertex of p to vertex of q")

    def image(self, u: int) -> int:
        return self.mapping[u]

    def named(self, p: TreeQuery, q: TreeQuery) -> Dict[str, str]:
        """The same map keyed and valued by vertex display names."""
        return {p.vertices[u].ref: q.vertices[v].ref for u, v in sorted(self.mapping.items())}


class CQHomWitness(BaseModel):
    """Variable assignment of a conjunctive-query homomorphism."""

    model_config = ConfigDict(frozen=True)

    mapping: Dict[str, Symbol] = Field(..., description="Variable of p to term of q")

    def apply(self, term: Symbol) -> Symbol:
        return self.mapping[term.name] if term.is_variable else term

    def apply_atom(self, a: Atom) -> Atom:
        return Atom(relation=a.relation, key_arity=a.key_arity, args=tuple(self.apply(t) for t in a.args))


class TreeMatcher:
    """Memoized feasibility of tree homomorphisms from ``p`` into ``q``.

    ``feasible(u, v)`` holds iff the subtree p|u maps into q with u sent to
    v. ⊥ leaves map anywhere, unary and constant leaves need an equal label,
    and relation vertices need the same label with children mapped
    position by position.
    """

    def __init__(self, p: TreeQuery, q: TreeQuery):
        self.p = p
        self.q = q
        self._memo: Dict[Tuple[int, int], bool] = {}

    def feasible(self, u: VertexRef, v: VertexRef) -> bool:
        pu, qv = self.p.resolve(u), self.q.resolve(v)
        return self._feasible(pu.index, qv.index)

    def _feasible(self, u: int, v: int) -> bool:
        key = (u, v)
        if key in self._memo:
            return self._memo[key]
        pu, qv = self.p.vertices[u], self.q.vertices[v]
        if pu.is_bottom:
            result = True
        elif not pu.is_internal:
            result = pu.label == qv.label
        else:
            result = (
                qv.is_internal
                and pu.label == qv.label
                and len(pu.children) == len(qv.children)
                and all(self._feasible(a, b) for a, b in zip(pu.children, qv.children))
            )
        self._memo[key] = result
        return result

    def _collect(self, u: int, v: int, mapping: Dict[int, int]):
        mapping[u] = v
        pu, qv = self.p.vertices[u], self.q.vertices[v]
        if pu.is_internal:
            for a, b in zip(pu.children, qv.children):
                self._collect(a, b, mapping)

    def witness_from(self, u: VertexRef, v: VertexRef) -> Optional[TreeHomWitness]:
        """Witness for p|u into q with u sent to v, if feasible."""
        pu, qv = self.p.resolve(u), self.q.resolve(v)
        if not self._feasible(pu.index, qv.index):
            return None
        mapping: Dict[int, int] = {}
        self._collect(pu.index, qv.index, mapping)
        return TreeHomWitness(mapping=mapping)

    def root_image(self, u: Vertex, v: Vertex) -> Optional[Vertex]:
        """The only possible image of p's root when u must map to v.

        Climbs from v along the child positions of the root-to-u path.
        """
        w = v
        while u.parent is not None:
            if w.parent is None or w.position != u.position:
                return None
            u = self.p.vertices[u.parent]
            w = self.q.vertices[w.parent]
        return w

    def pinned(self, u: VertexRef, v: VertexRef) -> Optional[TreeHomWitness]:
        """Witness for p ⪯_{u→v} q."""
        pu, qv = self.p.resolve(u), self.q.resolve(v)
        w = self.root_image(pu, qv)
        if w is None:
            return None
        return self.witness_from(self.p.root, w)

    def unpinned(self) -> Optional[TreeHomWitness]:
        """Witness for p ⪯ q, trying root images in breadth-first order."""
        for w in self.q.vertices:
            if self._feasible(0, w.index):
                return self.witness_from(0, w.index)
        return None


def tree_hom(
    p: TreeQuery,
    q: TreeQuery,
    root_pin: Optional[Tuple[VertexRef, VertexRef]] = None,
) -> Optional[TreeHomWitness]:
    """Decide p ⪯ q, or p ⪯_{u→v} q when ``root_pin=(u, v)`` is given.

    Raises:
        VertexNotFoundError: If a pinned vertex is not in its query
    """
    HOM_CHECKS.labels(kind='tree').inc()
    matcher = TreeMatcher(p, q)
    if root_pin is not None:
        return matcher.pinned(*root_pin)
    return matcher.unpinned()


def tree_equivalent(p: TreeQuery, q: TreeQuery) -> bool:
    return tree_hom(p, q) is not None and tree_hom(q, p) is not None


class _CQSearch:
    """Backtracking search for a homomorphism between atom sets."""

    def __init__(self, p: GraphQuery, q: GraphQuery):
        self.p = p
        by_shape: Dict[Tuple[str, int, int], List[Atom]] = {}
        for a in q.atoms:
            by_shape.setdefault((a.relation, a.arity, a.key_arity), []).append(a)
        self.targets = {a: by_shape.get((a.relation, a.arity, a.key_arity), []) for a in p.atoms}

    @staticmethod
    def _extend(source: Atom, target: Atom, assignment: Dict[str, Symbol]) -> Optional[Dict[str, Symbol]]:
        added: Dict[str, Symbol] = {}
        for s, t in zip(source.args, target.args):
            if s.is_constant:
                if s != t:
                    return None
                continue
            bound = assignment.get(s.name, added.get(s.name))
            if bound is None:
                added[s.name] = t
            elif bound != t:
                return None
        return added

    def _options(self, a: Atom, assignment: Dict[str, Symbol]) -> List[Dict[str, Symbol]]:
        options = []
        for t in self.targets[a]:
            added = self._extend(a, t, assignment)
            if added is not None:
                options.append(added)
        return options

    def search(self, remaining: List[Atom], assignment: Dict[str, Symbol]) -> Optional[Dict[str, Symbol]]:
        if not remaining:
            return dict(assignment)
        # most constrained atom first
        best: Optional[Tuple[Atom, List[Dict[str, Symbol]]]] = None
        for a in remaining:
            options = self._options(a, assignment)
            if best is None or len(options) < len(best[1]):
                best = (a, options)
            if not options:
                return None
        atom, options = best
        rest = [a for a in remaining if a is not atom]
        for added in options:
            assignment.update(added)
            found = self.search(rest, assignment)
            if found is not None:
                return found
            for name in added:
                del assignment[name]
        return None


def cq_hom(p: GraphQuery, q: GraphQuery) -> Optional[CQHomWitness]:
    """Find a homomorphism from p to q (identity on constants), if any."""
    HOM_CHECKS.labels(kind='cq').inc()
    mapping = _CQSearch(p, q).search(list(p.atoms), {})
    return CQHomWitness(mapping=mapping) if mapping is not None else None


def cq_equivalent(p: GraphQuery, q: GraphQuery) -> bool:
    return cq_hom(p, q) is not None and cq_hom(q, p) is not None


def core(q: GraphQuery) -> GraphQuery:
    """A minimal equivalent subquery, along the lexicographically least removal sequence.

    Each step drops the least atom (by ``Atom.sort_key``) whose removal
    leaves a query that q still maps into; survivors keep their input
    order. The result depends only on the atom set of q.
    """
    current = q
    changed = True
    while changed:
        changed = False
        for a in sorted(current.atoms, key=Atom.sort_key):
            smaller = current.without(a)
            if smaller is not None and cq_hom(current, smaller) is not None:
                logger.debug("Core drops atom", atom=a.render())
                current = smaller
                changed = True
                break
    return current


def is_minimal(q: GraphQuery) -> bool:
    return len(core(q)) == len(q)
