"""Rewinding, the syntactic conditions and complexity classification."""

from enum import Enum
from itertools import combinations
from typing import Dict, List, Optional, Tuple

import networkx as nx
from pydantic import BaseModel, ConfigDict, Field

from ..config import config
from ..core.exceptions import CQAError, LabelMismatchError, ValidationError
from ..core.logging import get_logger, with_logging
from ..core.metrics import CLASSIFICATIONS
from ..models import GraphQuery, Label, Sketch, TreeQuery, Vertex, VertexRef
from .attack_graph import attack_graph
from .homomorphism import TreeMatcher, core, tree_hom

logger = get_logger('cqa_trees.services.classification')


class ComplexityClass(str, Enum):
    """Complexity of CQA(q), ordered from easiest to hardest."""

    FO = "FO"
    NL_HARD_IN_LFP = "NL_HARD_IN_LFP"
    LHARD_NOT_FO_UPPER_OPEN = "LHARD_NOT_FO_UPPER_OPEN"
    CONP_COMPLETE = "CONP_COMPLETE"

    @property
    def rank(self) -> int:
        return list(ComplexityClass).index(self)

    def __lt__(self, other: 'ComplexityClass') -> bool:
        return self.rank < other.rank

    def __le__(self, other: 'ComplexityClass') -> bool:
        return self.rank <= other.rank

    def __gt__(self, other: 'ComplexityClass') -> bool:
        return self.rank > other.rank

    def __ge__(self, other: 'ComplexityClass') -> bool:
        return self.rank >= other.rank


class WitnessPair(BaseModel):
    """A same-relation vertex pair violating a condition."""

    model_config = ConfigDict(frozen=True)

    condition: str
    relation: str
    x: str
    y: str

    def render(self) -> str:
        return f"{self.condition}:{self.relation}({self.x},{self.y})"


class ConditionReport(BaseModel):
    """Outcome of the five syntactic conditions for one tree query."""

    model_config = ConfigDict(frozen=True)

    c_branch: bool
    c_factor: bool
    c_prefix: bool
    c1: bool
    c2: bool
    witnesses: Tuple[WitnessPair, ...] = ()

    def witnesses_for(self, condition: str) -> List[WitnessPair]:
        return [w for w in self.witnesses if w.condition == condition]


class TreeClassification(BaseModel):
    model_config = ConfigDict(frozen=True)

    query: str
    complexity: ComplexityClass
    conditions: ConditionReport


class ComponentReport(BaseModel):
    """Classification of one connected component of a GraphBCQ query."""

    model_config = ConfigDict(frozen=True)

    query: str
    complexity: ComplexityClass
    tree: Optional[str] = Field(None, description="Tree representation when the component is a tree query")
    conditions: Optional[ConditionReport] = None
    berge_acyclic: bool
    strong_cycle: Optional[bool] = Field(None, description="Strong attack cycle in sjf(component), for non-tree components")


class GraphClassification(BaseModel):
    model_config = ConfigDict(frozen=True)

    query: str
    core: str
    components: Tuple[ComponentReport, ...]
    complexity: ComplexityClass
    upper_bound_open: bool = Field(False, description="Some component only has a lower bound")


# Rewinding

def _require_same_label(x: Vertex, y: Vertex):
    if not (x.is_internal and y.is_internal):
        raise LabelMismatchError(x.ref, y.ref, "vertices must be internal")
    if x.label != y.label:
        raise LabelMismatchError(x.ref, y.ref, f"labels {x.label} and {y.label} differ")


def rewind(q: TreeQuery, y: VertexRef, x: VertexRef) -> TreeQuery:
    """q[y←x]: replace the subtree at y by a fresh copy of the subtree at x.

    The copy's root keeps y's name; every other copied vertex gets a fresh
    ``x<k>`` name above all existing ones.

    Raises:
        LabelMismatchError: If x and y are not internal with the same label
    """
    vy, vx = q.resolve(y), q.resolve(x)
    _require_same_label(vx, vy)
    copy = q.to_sketch(vx, keep_names=False)
    copy = Sketch(label=copy.label, name=vy.name, children=copy.children)

    def build(v: Vertex) -> Sketch:
        if v.index == vy.index:
            return copy
        return Sketch(label=v.label, name=v.name, children=tuple(build(q.vertices[c]) for c in v.children))

    return TreeQuery.from_sketch(build(q.root), fresh_start=q.max_fresh_index + 1)


# Conditions

def same_label_pairs(q: TreeQuery) -> List[Tuple[Vertex, Vertex]]:
    """Unordered pairs of distinct internal vertices sharing a label, x before y."""
    by_label: Dict[str, List[Vertex]] = {}
    for v in q.internal_vertices():
        by_label.setdefault(v.label.name, []).append(v)
    return [pair for vs in by_label.values() for pair in combinations(vs, 2)]


def maps_into_rewind(q: TreeQuery, y: VertexRef, x: VertexRef, pinned: bool) -> bool:
    """q ⪯ q[y←x], or its root-pinned version when ``pinned`` is set."""
    rewound = rewind(q, y, x)
    pin = (q.root.index, rewound.root.index) if pinned else None
    return tree_hom(q, rewound, root_pin=pin) is not None


def direct_conditions(q: TreeQuery) -> Tuple[bool, bool]:
    """(C1, C2) straight from their definitions, trying both rewind directions."""
    c1 = c2 = True
    for x, y in same_label_pairs(q):
        if c2 and not (maps_into_rewind(q, y, x, False) or maps_into_rewind(q, x, y, False)):
            c2 = False
        if c1 and not (maps_into_rewind(q, y, x, True) or maps_into_rewind(q, x, y, True)):
            c1 = False
        if not (c1 or c2):
            break
    return c1, c2


@with_logging
def check_conditions(q: TreeQuery, verify: Optional[bool] = None) -> ConditionReport:
    """Evaluate C_branch, C_factor and C_prefix, and assemble C1 and C2.

    With ``verify`` (default from the engine config) C1 and C2 are also
    computed from their direct definitions and must agree.
    """
    matcher = TreeMatcher(q, q)
    witnesses: List[WitnessPair] = []
    for x, y in same_label_pairs(q):
        relation = x.label.name
        if q.incomparable(x, y):
            if not (matcher.feasible(y, x) or matcher.feasible(x, y)):
                witnesses.append(WitnessPair(condition='c_branch', relation=relation, x=x.name, y=y.name))
            continue
        # breadth-first order puts the ancestor first
        if not maps_into_rewind(q, y, x, False):
            witnesses.append(WitnessPair(condition='c_factor', relation=relation, x=x.name, y=y.name))
        if not maps_into_rewind(q, y, x, True):
            witnesses.append(WitnessPair(condition='c_prefix', relation=relation, x=x.name, y=y.name))

    violated = {w.condition for w in witnesses}
    c_branch = 'c_branch' not in violated
    c_factor = 'c_factor' not in violated
    c_prefix = 'c_prefix' not in violated
    report = ConditionReport(
        c_branch=c_branch,
        c_factor=c_factor,
        c_prefix=c_prefix,
        c1=c_prefix and c_branch,
        c2=c_factor and c_branch,
        witnesses=tuple(witnesses),
    )

    if verify is None:
        verify = config.engine.verify_decomposition
    if verify:
        c1, c2 = direct_conditions(q)
        if (c1, c2) != (report.c1, report.c2):
            logger.error(
                "Condition decomposition disagrees with direct definitions",
                query=q.to_string(), direct=(c1, c2), decomposed=(report.c1, report.c2),
            )
            raise CQAError(f"C1/C2 decomposition mismatch for {q.to_string()}", error_code="decomposition")
    return report


def classify_tree(q: TreeQuery, verify: Optional[bool] = None) -> TreeClassification:
    """C1 gives FO, C2 without C1 gives NL-hard in LFP, otherwise coNP-complete."""
    report = check_conditions(q, verify=verify)
    if report.c1:
        complexity = ComplexityClass.FO
    elif report.c2:
        complexity = ComplexityClass.NL_HARD_IN_LFP
    else:
        complexity = ComplexityClass.CONP_COMPLETE
    CLASSIFICATIONS.labels(complexity=complexity.value).inc()
    logger.info("Classified tree query", query=q.to_string(), complexity=complexity.value)
    return TreeClassification(query=q.to_string(), complexity=complexity, conditions=report)


def preorder_le(q: TreeQuery, x: VertexRef, y: VertexRef) -> bool:
    """x ⪯_q y: x is a strict ancestor of y, or q|y maps into q|x with y sent to x.

    Raises:
        LabelMismatchError: If x and y do not share a relation label
    """
    vx, vy = q.resolve(x), q.resolve(y)
    _require_same_label(vx, vy)
    return q.is_ancestor(vx, vy) or TreeMatcher(q, q).feasible(vy, vx)


# GraphBCQ

def connected_components(q: GraphQuery) -> List[GraphQuery]:
    """Atoms grouped by shared variables, ordered by their first atom."""
    graph = nx.Graph()
    graph.add_nodes_from(range(len(q.atoms)))
    owners: Dict[str, List[int]] = {}
    for i, a in enumerate(q.atoms):
        for name in a.variables():
            owners.setdefault(name, []).append(i)
    for indices in owners.values():
        graph.add_edges_from(zip(indices, indices[1:]))
    groups = sorted((sorted(c) for c in nx.connected_components(graph)), key=lambda c: c[0])
    return [q.subquery(c) for c in groups]


def is_tree_query(q: GraphQuery) -> Optional[TreeQuery]:
    """The tree representation of a connected GraphBCQ query, if it has one.

    The root is the one key variable never used at a non-key position, every
    variable occurs at most once at a non-key position, and the atoms reached
    from the root must cover q. Variable names are kept.

    Raises:
        NotGraphBCQError: If q is not in GraphBCQ
        ValidationError: If q is not connected
    """
    q.require_graphbcq('is_tree_query')
    if len(connected_components(q)) != 1:
        raise ValidationError("is_tree_query: query is not connected")

    non_key: Dict[str, int] = {}
    for a in q.atoms:
        for t in a.values:
            if t.is_variable:
                non_key[t.name] = non_key.get(t.name, 0) + 1
    if any(n > 1 for n in non_key.values()):
        return None
    owner = {a.key[0].name: a for a in q.atoms}
    roots = [k for k in owner if k not in non_key]
    if len(roots) != 1:
        return None

    covered: set = set()

    def build(name: str) -> Optional[Sketch]:
        a = owner[name]
        if a in covered:
            return None
        covered.add(a)
        if a.arity == 1:
            return Sketch(label=Label.unary(a.relation), name=name)
        children = []
        for t in a.values:
            if t.is_constant:
                children.append(Sketch(label=Label.constant(t.name)))
            elif t.name in owner:
                child = build(t.name)
                if child is None:
                    return None
                children.append(child)
            else:
                children.append(Sketch(label=Label.bottom(), name=t.name))
        return Sketch(label=Label.relation(a.relation), name=name, children=tuple(children))

    sketch = build(roots[0])
    if sketch is None or len(covered) != len(q.atoms):
        return None
    return TreeQuery.from_sketch(sketch)


def berge_acyclic(q: GraphQuery) -> bool:
    """Whether the variable/atom incidence multigraph is a forest."""
    graph = nx.MultiGraph()
    for i, a in enumerate(q.atoms):
        graph.add_node(('atom', i))
        for t in a.args:
            if t.is_variable:
                graph.add_edge(('atom', i), ('var', t.name))
    return nx.is_forest(graph)


def _classify_component(component: GraphQuery, verify: Optional[bool]) -> ComponentReport:
    acyclic = berge_acyclic(component)
    tree = is_tree_query(component)
    if tree is not None:
        result = classify_tree(tree, verify=verify)
        return ComponentReport(
            query=component.render(),
            complexity=result.complexity,
            tree=tree.to_string(),
            conditions=result.conditions,
            berge_acyclic=acyclic,
        )
    sjf, _ = component.self_join_free()
    strong = attack_graph(sjf).has_strong_cycle()
    complexity = ComplexityClass.CONP_COMPLETE if acyclic else ComplexityClass.LHARD_NOT_FO_UPPER_OPEN
    CLASSIFICATIONS.labels(complexity=complexity.value).inc()
    return ComponentReport(
        query=component.render(),
        complexity=complexity,
        berge_acyclic=acyclic,
        strong_cycle=strong,
    )


@with_logging
def classify_graph(q: GraphQuery, verify: Optional[bool] = None) -> GraphClassification:
    """Classify a GraphBCQ query through its core's connected components.

    Tree components follow the tree trichotomy, other Berge-acyclic
    components are coNP-complete and the rest are L-hard and not in FO.

    Raises:
        NotGraphBCQError: If q is not in GraphBCQ
    """
    q.require_graphbcq('classify_graph')
    minimal = core(q)
    reports = tuple(_classify_component(c, verify) for c in connected_components(minimal))
    overall = max((r.complexity for r in reports), key=lambda c: c.rank)
    open_bound = (
        any(r.complexity is ComplexityClass.LHARD_NOT_FO_UPPER_OPEN for r in reports)
        and overall is not ComplexityClass.CONP_COMPLETE
    )
    logger.info("Classified graph query", query=q.render(), complexity=overall.value, components=len(reports))
    return GraphClassification(
        query=q.render(),
        core=minimal.render(),
        components=reports,
        complexity=overall,
        upper_bound_open=open_bound,
    )


def classify(q) -> ComplexityClass:
    """Complexity class of a TreeQuery or GraphQuery."""
    if isinstance(q, TreeQuery):
        return classify_tree(q).complexity
    return classify_graph(q).complexity
