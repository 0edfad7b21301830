"""Attack graphs of self-join-free conjunctive queries."""

from collections import deque
from enum import Enum
from typing import Dict, FrozenSet, Iterable, List, Optional, Set, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from ..core.exceptions import SelfJoinError
from ..core.logging import get_logger, with_logging
from ..models import Atom, GraphQuery

logger = get_logger('cqa_trees.services.attack_graph')


class AttackStrength(str, Enum):
    WEAK = "weak"
    STRONG = "strong"


class AttackEdge(BaseModel):
    model_config = ConfigDict(frozen=True)

    source: str = Field(..., description="Relation name of the attacking atom")
    target: str = Field(..., description="Relation name of the attacked atom")
    strength: AttackStrength


FD = Tuple[FrozenSet[str], FrozenSet[str]]


def _fds(q: GraphQuery, skip: Iterable[Atom] = ()) -> List[FD]:
    skipped = set(skip)
    return [
        (frozenset(a.key_variables()), frozenset(a.variables()))
        for a in q.atoms if a not in skipped
    ]


def attribute_closure(start: Iterable[str], fds: List[FD]) -> FrozenSet[str]:
    """Closure of a variable set under functional dependencies."""
    closure: Set[str] = set(start)
    changed = True
    while changed:
        changed = False
        for lhs, rhs in fds:
            if lhs <= closure and not rhs <= closure:
                closure |= rhs
                changed = True
    return frozenset(closure)


class AttackGraph(BaseModel):
    """Attack graph over the atoms of a self-join-free query.

    Atoms are identified by relation name. ``closures`` holds F^{+,q}: the
    closure of key(F) under the dependencies of every other atom.
    """

    model_config = ConfigDict(frozen=True)

    atoms: Tuple[str, ...]
    closures: Dict[str, FrozenSet[str]]
    edges: Tuple[AttackEdge, ...]

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(self.atoms)
        for e in self.edges:
            graph.add_edge(e.source, e.target, strength=e.strength.value)
        return graph

    def attacks(self, source: str, target: str) -> bool:
        return any(e.source == source and e.target == target for e in self.edges)

    def is_acyclic(self) -> bool:
        return nx.is_directed_acyclic_graph(self.to_networkx())

    def strong_cycle(self) -> Optional[Tuple[str, str]]:
        """A pair of atoms attacking each other with at least one strong attack.

        An attack graph has a strong cycle iff it has one of length two.
        """
        strength = {(e.source, e.target): e.strength for e in self.edges}
        for (f, g), s in sorted(strength.items()):
            back = strength.get((g, f))
            if back is not None and AttackStrength.STRONG in (s, back):
                return f, g
        return None

    def has_strong_cycle(self) -> bool:
        return self.strong_cycle() is not None

    def summary(self) -> Dict[str, object]:
        return {
            'atoms': len(self.atoms),
            'edges': len(self.edges),
            'acyclic': self.is_acyclic(),
            'strong_cycle': self.has_strong_cycle(),
        }


@with_logging
def attack_graph(q: GraphQuery) -> AttackGraph:
    """Build the attack graph of a self-join-free query.

    F attacks G when some chain of atoms from F to G links neighbours by a
    variable outside F^{+,q}. The attack is weak when key(G) lies in the
    closure of key(F) under all dependencies of q, strong otherwise.

    Raises:
        SelfJoinError: If two atoms share a relation name
    """
    if not q.is_selfjoinfree:
        raise SelfJoinError('attack_graph', "query has self-joins; rename atoms with self_join_free()")

    all_fds = _fds(q)
    closures = {a.relation: attribute_closure(a.key_variables(), _fds(q, skip=[a])) for a in q.atoms}
    edges: List[AttackEdge] = []
    for f in q.atoms:
        plus = closures[f.relation]
        reached = {f.relation}
        queue = deque([f])
        while queue:
            current = queue.popleft()
            free = set(current.variables()) - plus
            for g in q.atoms:
                if g.relation in reached or not free & set(g.variables()):
                    continue
                reached.add(g.relation)
                queue.append(g)
        key_closure = attribute_closure(f.key_variables(), all_fds)
        for g in q.atoms:
            if g.relation == f.relation or g.relation not in reached:
                continue
            weak = set(g.key_variables()) <= key_closure
            edges.append(AttackEdge(
                source=f.relation,
                target=g.relation,
                strength=AttackStrength.WEAK if weak else AttackStrength.STRONG,
            ))
    graph = AttackGraph(atoms=tuple(a.relation for a in q.atoms), closures=closures, edges=tuple(edges))
    logger.debug("Attack graph built", **graph.summary())
    return graph
