"""Certain answers through the fixpoint of constant/vertex pairs."""

from enum import Enum
from typing import Dict, FrozenSet, List, Optional, Set, Tuple

from pydantic import BaseModel, ConfigDict, Field

from ..core.exceptions import FrugalComparabilityError, LabelMismatchError, MethodConditionError
from ..core.logging import get_logger, with_logging
from ..core.metrics import FIXPOINT_PAIRS, FIXPOINT_ROUNDS, FRUGAL_VIOLATIONS
from ..core.utils import is_subset_chain
from ..models import BlockId, Database, Fact, TreeQuery, VertexRef
from .classification import ComplexityClass, classify_tree
from .oracle import brute_certain_report

logger = get_logger('cqa_trees.services.engine')

Pair = Tuple[str, int]


class CertMemo(BaseModel):
    """The pair set B of a finished fixpoint run.

    ``entered`` records the round in which each pair joined B; round 0 is
    the initialization.
    """

    model_config = ConfigDict(frozen=True)

    query: TreeQuery
    pairs: FrozenSet[Pair]
    entered: Dict[Pair, int] = Field(default_factory=dict)
    rounds: int = 0
    forward_only: bool = False

    def __contains__(self, pair: object) -> bool:
        return pair in self.pairs

    def holds(self, c: str, u: VertexRef) -> bool:
        return (c, self.query.resolve(u).index) in self.pairs

    def constants_at(self, u: VertexRef) -> FrozenSet[str]:
        index = self.query.resolve(u).index
        return frozenset(c for c, v in self.pairs if v == index)


class FixpointEvaluator:
    """Computes B for one query and one database.

    A fact R(c; d1..dn) holds at vertex y when, for y itself or one of its
    same-label strict ancestors z, every (d_i, i-th child of z) is in B.
    Leaving the ancestors out gives the forward-only variant.
    """

    def __init__(self, q: TreeQuery, db: Database, backward: bool = True):
        self.q = q
        self.db = db
        self.backward = backward
        self.chains: Dict[int, Tuple[int, ...]] = {}
        for v in q.internal_vertices():
            up = [a.index for a in q.ancestors(v) if a.is_internal and a.label == v.label] if backward else []
            self.chains[v.index] = (v.index, *up)
        self.dependents: Dict[int, List[int]] = {}
        for y, chain in self.chains.items():
            for z in chain:
                self.dependents.setdefault(z, []).append(y)
        # (relation, position, value) -> keys of unary-key facts with that value there
        self.uses: Dict[Tuple[str, int, str], Set[str]] = {}
        for f in db.facts:
            if len(f.key) == 1:
                for i, d in enumerate(f.values):
                    self.uses.setdefault((f.relation, i, d), set()).add(f.key[0])

    def initial_pairs(self) -> Set[Pair]:
        pairs: Set[Pair] = set()
        for v in self.q.vertices:
            if v.is_bottom:
                pairs.update((c, v.index) for c in self.db.adom)
            elif v.is_constant and v.label.name in self.db.adom:
                pairs.add((v.label.name, v.index))
            elif v.is_unary:
                pairs.update(
                    (f.key[0], v.index) for f in self.db.facts
                    if f.relation == v.label.name and len(f.key) == 1 and not f.values
                )
        return pairs

    def fact_holds(self, pairs, f: Fact, y: int) -> bool:
        for z in self.chains[y]:
            children = self.q.vertices[z].children
            if len(f.values) == len(children) and all(
                (d, child) in pairs for d, child in zip(f.values, children)
            ):
                return True
        return False

    def _admits(self, pairs, c: str, y: int) -> bool:
        block = self.db.block(self.q.vertices[y].label.name, (c,))
        return bool(block) and all(self.fact_holds(pairs, f, y) for f in block)

    def _all_candidates(self) -> Set[Pair]:
        candidates: Set[Pair] = set()
        for y in self.chains:
            relation = self.q.vertices[y].label.name
            candidates.update((key[0], y) for (rel, key) in self.db.blocks if rel == relation and len(key) == 1)
        return candidates

    def _candidates_after(self, delta: Set[Pair]) -> Set[Pair]:
        candidates: Set[Pair] = set()
        for d, v in delta:
            vertex = self.q.vertices[v]
            if vertex.parent is None:
                continue
            z = self.q.vertices[vertex.parent]
            keys = self.uses.get((z.label.name, vertex.position, d), ())
            for y in self.dependents.get(z.index, ()):
                candidates.update((c, y) for c in keys)
        return candidates

    def run(self) -> CertMemo:
        pairs = self.initial_pairs()
        entered = {p: 0 for p in pairs}
        candidates = self._all_candidates()
        rounds = 0
        while True:
            # all pairs of a round are judged against the previous round's B
            delta = {p for p in candidates if p not in pairs and self._admits(pairs, *p)}
            if not delta:
                break
            rounds += 1
            pairs |= delta
            entered.update((p, rounds) for p in delta)
            candidates = self._candidates_after(delta)
        variant = 'backward' if self.backward else 'forward'
        FIXPOINT_ROUNDS.labels(variant=variant).observe(rounds)
        FIXPOINT_PAIRS.observe(len(pairs))
        logger.debug("Fixpoint reached", variant=variant, rounds=rounds, pairs=len(pairs))
        return CertMemo(
            query=self.q, pairs=frozenset(pairs), entered=entered,
            rounds=rounds, forward_only=not self.backward,
        )


def fact_holds(q: TreeQuery, db: Database, B: CertMemo, f: Fact, y: VertexRef) -> bool:
    """fact(f, y) evaluated against the pair set B.

    Raises:
        LabelMismatchError: If y is not internal or f is not an R-fact for y's label R
    """
    vy = q.resolve(y)
    if not vy.is_internal or vy.label.name != f.relation:
        raise LabelMismatchError(f.render(), vy.ref, "fact relation must equal the vertex label")
    evaluator = FixpointEvaluator(q, db, backward=not B.forward_only)
    return evaluator.fact_holds(B.pairs, f, vy.index)


@with_logging
def compute_B(q: TreeQuery, db: Database) -> CertMemo:
    """Least fixpoint B with backward rules."""
    return FixpointEvaluator(q, db).run()


@with_logging
def compute_B_forward(q: TreeQuery, db: Database) -> CertMemo:
    """Least fixpoint B without backward rules."""
    return FixpointEvaluator(q, db, backward=False).run()


def start_set(q: TreeQuery, db: Database, memo: Optional[CertMemo] = None) -> FrozenSet[str]:
    """Constants c with ⟨c, root⟩ in B."""
    memo = memo or compute_B(q, db)
    return memo.constants_at(q.root)


def certain_trace(q: TreeQuery, db: Database) -> bool:
    """Whether some constant starts an accepted rooted tree set in every repair.

    Only meaningful when q satisfies C_branch.
    """
    return bool(start_set(q, db))


def frugal_sets(
    q: TreeQuery,
    db: Database,
    memo: Optional[CertMemo] = None,
) -> Dict[BlockId, Dict[Fact, FrozenSet[str]]]:
    """Per block, each fact's frugal set: the same-label vertices at which it holds."""
    memo = memo or compute_B(q, db)
    evaluator = FixpointEvaluator(q, db, backward=not memo.forward_only)
    by_label: Dict[str, List[int]] = {}
    for v in q.internal_vertices():
        by_label.setdefault(v.label.name, []).append(v.index)

    result: Dict[BlockId, Dict[Fact, FrozenSet[str]]] = {}
    for block_id, facts in db.blocks.items():
        relation, key = block_id
        vertices = by_label.get(relation, []) if len(key) == 1 else []
        result[block_id] = {
            f: frozenset(q.vertices[y].name for y in vertices if evaluator.fact_holds(memo.pairs, f, y))
            for f in facts
        }
    return result


def _render_block(block_id: BlockId) -> str:
    relation, key = block_id
    return f"{relation}({', '.join(key)},*)"


@with_logging
def frugal_repair(q: TreeQuery, db: Database, memo: Optional[CertMemo] = None) -> Database:
    """The repair picking, in every block, a fact with ⊆-minimal frugal set.

    Ties go to the least fact.

    Raises:
        FrugalComparabilityError: If two frugal sets of one block are incomparable
    """
    chosen: List[Fact] = []
    for block_id, sets in frugal_sets(q, db, memo).items():
        clash = is_subset_chain(sets.values())
        if clash is not None:
            FRUGAL_VIOLATIONS.inc()
            first, second = clash
            raise FrugalComparabilityError(
                _render_block(block_id),
                "{" + ", ".join(sorted(first)) + "}",
                "{" + ", ".join(sorted(second)) + "}",
            )
        chosen.append(min(sets, key=lambda f: (len(sets[f]), f.sort_key())))
    return Database(facts=frozenset(chosen))


class EvaluationMethod(str, Enum):
    FIXPOINT = "fixpoint"
    FORWARD = "forward"
    ORACLE = "oracle"


class CertainAnswer(BaseModel):
    """Decision of CQA(q) on one database."""

    model_config = ConfigDict(frozen=True)

    value: bool
    method: EvaluationMethod
    witness: Optional[str] = Field(None, description="Least constant starting an accepted tree in every repair")
    complexity: ComplexityClass
    repairs_checked: Optional[int] = None


@with_logging
def certain(
    q: TreeQuery,
    db: Database,
    oracle_cap: Optional[int] = None,
    method: str = 'auto',
    force: bool = False,
) -> CertainAnswer:
    """Decide whether every repair of db satisfies q.

    ``auto`` uses the forward-only fixpoint under C1, the full fixpoint under
    C2 and the oracle otherwise. Forcing ``forward`` or ``fixpoint`` on a
    query outside their condition needs ``force``.

    Raises:
        MethodConditionError: If a method is requested outside its condition
        OracleCapExceeded: If the oracle would enumerate more than the cap
    """
    classification = classify_tree(q)
    report = classification.conditions
    chosen = EvaluationMethod(method) if method != 'auto' else (
        EvaluationMethod.FORWARD if report.c1
        else EvaluationMethod.FIXPOINT if report.c2
        else EvaluationMethod.ORACLE
    )
    if chosen is EvaluationMethod.FORWARD and not report.c1 and not force:
        raise MethodConditionError('certain', "forward evaluation needs C1; pass force to override")
    if chosen is EvaluationMethod.FIXPOINT and not report.c2 and not force:
        raise MethodConditionError('certain', "fixpoint evaluation needs C2; pass force to override")

    if chosen is EvaluationMethod.ORACLE:
        result = brute_certain_report(q, db, oracle_cap)
        answer = CertainAnswer(
            value=result.value, method=chosen, complexity=classification.complexity,
            repairs_checked=result.repairs_checked,
        )
    else:
        memo = compute_B_forward(q, db) if chosen is EvaluationMethod.FORWARD else compute_B(q, db)
        starts = start_set(q, db, memo)
        answer = CertainAnswer(
            value=bool(starts), method=chosen, complexity=classification.complexity,
            witness=min(starts) if starts else None,
        )
    logger.info("Certain answer decided", value=answer.value, method=answer.method.value, witness=answer.witness)
    return answer
