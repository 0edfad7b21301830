"""Brute-force ground truth: repair enumeration and query evaluation."""

import itertools
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field

from ..config import config
from ..core.exceptions import OracleCapExceeded
from ..core.logging import get_logger, with_logging
from ..core.metrics import ORACLE_DURATION, REPAIRS_ENUMERATED
from ..models import Database, Fact, GraphQuery, TreeQuery
from .grammar import accepted_constants, build_cfg

logger = get_logger('cqa_trees.services.oracle')

Valuation = Dict[str, str]


class RepairCursor:
    """Enumerates the repairs of a database in lexicographic block order.

    Blocks are ordered by (relation, key) and facts within a block by their
    sort key; the i-th repair picks facts by the i-th index vector of the
    mixed-radix counter over block sizes.
    """

    def __init__(self, db: Database):
        self.db = db
        self.blocks: List[Tuple[Fact, ...]] = list(db.blocks.values())
        self.total = db.repair_count

    def __len__(self) -> int:
        return self.total

    def choices(self) -> Iterator[Tuple[Fact, ...]]:
        """One fact per block, for every repair."""
        for choice in itertools.product(*self.blocks):
            REPAIRS_ENUMERATED.inc()
            yield choice

    def __iter__(self) -> Iterator[Database]:
        for choice in self.choices():
            yield Database(facts=frozenset(choice))


def _cap(cap: Optional[int]) -> int:
    return config.oracle.cap if cap is None else cap


def enumerate_repairs(db: Database, cap: Optional[int] = None) -> RepairCursor:
    """Cursor over every repair of db.

    Raises:
        OracleCapExceeded: If db has more repairs than ``cap``
    """
    limit = _cap(cap)
    cursor = RepairCursor(db)
    if cursor.total > limit:
        raise OracleCapExceeded(cursor.total, limit)
    return cursor


class QueryEvaluator:
    """Backtracking evaluation of one conjunctive query over fact sets."""

    def __init__(self, q: GraphQuery):
        self.q = q
        # per atom: relation, arity, key arity, terms as (is_variable, name)
        self.atoms = [
            (a.relation, a.arity, a.key_arity, tuple((t.is_variable, t.name) for t in a.args))
            for a in q.atoms
        ]

    def evaluate(self, facts) -> Optional[Valuation]:
        """Any valuation realizing every atom as one of ``facts``."""
        by_relation: Dict[Tuple[str, int, int], List[Tuple[str, ...]]] = {}
        by_key: Dict[Tuple[str, Tuple[str, ...]], List[Tuple[str, ...]]] = {}
        for f in facts:
            args = f.key + f.values
            by_relation.setdefault((f.relation, len(args), len(f.key)), []).append(args)
            by_key.setdefault((f.relation, f.key), []).append(args)

        def candidates(atom, valuation: Valuation) -> List[Tuple[str, ...]]:
            relation, arity, key_arity, terms = atom
            key: List[str] = []
            for is_var, name in terms[:key_arity]:
                if is_var:
                    if name not in valuation:
                        return [args for args in by_relation.get((relation, arity, key_arity), [])
                                if _matches(terms, args, valuation)]
                    key.append(valuation[name])
                else:
                    key.append(name)
            return [args for args in by_key.get((relation, tuple(key)), [])
                    if len(args) == arity and _matches(terms, args, valuation)]

        def search(remaining: List[int], valuation: Valuation) -> Optional[Valuation]:
            if not remaining:
                return dict(valuation)
            best: Optional[Tuple[int, List[Tuple[str, ...]]]] = None
            for i in remaining:
                options = candidates(self.atoms[i], valuation)
                if not options:
                    return None
                if best is None or len(options) < len(best[1]):
                    best = (i, options)
            index, options = best
            rest = [i for i in remaining if i != index]
            terms = self.atoms[index][3]
            for args in options:
                added = [name for (is_var, name), value in zip(terms, args)
                         if is_var and name not in valuation]
                for (is_var, name), value in zip(terms, args):
                    if is_var:
                        valuation.setdefault(name, value)
                found = search(rest, valuation)
                if found is not None:
                    return found
                for name in added:
                    valuation.pop(name, None)
            return None

        return search(list(range(len(self.atoms))), {})


def _matches(terms, args: Tuple[str, ...], valuation: Valuation) -> bool:
    seen: Dict[str, str] = {}
    for (is_var, name), value in zip(terms, args):
        if not is_var:
            if name != value:
                return False
            continue
        bound = valuation.get(name, seen.get(name))
        if bound is None:
            seen[name] = value
        elif bound != value:
            return False
    return True


def _as_graph(q: Union[TreeQuery, GraphQuery]) -> GraphQuery:
    return q.to_graph() if isinstance(q, TreeQuery) else q


def eval_cq(q: Union[TreeQuery, GraphQuery], instance: Database) -> Optional[Valuation]:
    """A valuation of vars(q) into adom(instance) satisfying q, if any."""
    return QueryEvaluator(_as_graph(q)).evaluate(instance.facts)


class OracleResult(BaseModel):
    """Outcome of a brute-force certainty check."""

    model_config = ConfigDict(frozen=True)

    value: bool
    repairs_checked: int
    repair_count: int
    falsifying_repair: Optional[Database] = Field(None, description="First repair in which q fails")


@with_logging
def brute_certain_report(
    q: Union[TreeQuery, GraphQuery],
    db: Database,
    cap: Optional[int] = None,
) -> OracleResult:
    """Check q on every repair of db, stopping at the first falsifying one.

    Raises:
        OracleCapExceeded: If db has more repairs than ``cap``
    """
    cursor = enumerate_repairs(db, cap)
    evaluator = QueryEvaluator(_as_graph(q))
    checked = 0
    with ORACLE_DURATION.time():
        for choice in cursor.choices():
            checked += 1
            if evaluator.evaluate(choice) is None:
                logger.debug("Falsifying repair found", repairs_checked=checked, repairs=cursor.total)
                return OracleResult(
                    value=False,
                    repairs_checked=checked,
                    repair_count=cursor.total,
                    falsifying_repair=Database(facts=frozenset(choice)),
                )
    return OracleResult(value=True, repairs_checked=checked, repair_count=cursor.total)


def brute_certain(q: Union[TreeQuery, GraphQuery], db: Database, cap: Optional[int] = None) -> bool:
    """Whether every repair of db satisfies q."""
    return brute_certain_report(q, db, cap).value


def brute_start_set(q: TreeQuery, db: Database, cap: Optional[int] = None) -> FrozenSet[str]:
    """Constants c of adom(db) from which every repair has a rooted tree set accepted by TreeCFG(q)."""
    cursor = enumerate_repairs(db, cap)
    g = build_cfg(q)
    candidates = frozenset(db.adom)
    with ORACLE_DURATION.time():
        for repair in cursor:
            candidates &= accepted_constants(g, q.root.index, repair)
            if not candidates:
                break
    return candidates


def brute_certain_trace(q: TreeQuery, db: Database, cap: Optional[int] = None) -> bool:
    """Whether some constant starts an accepted rooted tree set in every repair."""
    return bool(brute_start_set(q, db, cap))
