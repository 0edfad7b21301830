"""Tests for the fixpoint engine, frugal repairs and method selection."""

import itertools

import pytest

from cqa_trees.core.exceptions import FrugalComparabilityError, LabelMismatchError, MethodConditionError
from cqa_trees.models import fact, parse_database, parse_tree_query
from cqa_trees.services.classification import ComplexityClass, preorder_le
from cqa_trees.services.engine import (
    EvaluationMethod,
    certain,
    certain_trace,
    compute_B,
    compute_B_forward,
    fact_holds,
    frugal_repair,
    frugal_sets,
    start_set,
)
from cqa_trees.services.fuzzing import label_groups, random_database, random_query_where, satisfies_c2
from cqa_trees.services.oracle import brute_certain, brute_start_set, eval_cq


def test_chain_pairs(rrx, chain_db):
    memo = compute_B(rrx, chain_db)
    assert {('a', 0), ('b', 1), ('c', 2)} <= memo.pairs
    assert memo.holds('a', 'x0')
    assert memo.constants_at('x0') == frozenset({'a'})
    assert memo.entered[('c', 2)] == 1
    assert memo.entered[('a', 0)] == 3
    assert memo.rounds == 3


def test_bottom_vertex_holds_every_constant(rrx, chain_db):
    memo = compute_B(rrx, chain_db)
    assert memo.constants_at('x3') == chain_db.adom
    assert all(memo.entered[(c, 3)] == 0 for c in chain_db.adom)


def test_fact_holds_forward_and_backward(rrx, chain_db):
    memo = compute_B(rrx, chain_db)
    assert fact_holds(rrx, chain_db, memo, fact('R', 'b', 'c'), 'x1')
    # R(a; b) holds at x1 only by continuing as its ancestor x0
    assert fact_holds(rrx, chain_db, memo, fact('R', 'a', 'b'), 'x1')
    forward = compute_B_forward(rrx, chain_db)
    assert not fact_holds(rrx, chain_db, forward, fact('R', 'a', 'b'), 'x1')


def test_fact_holds_rejects_other_relation(rrx, chain_db):
    memo = compute_B(rrx, chain_db)
    with pytest.raises(LabelMismatchError):
        fact_holds(rrx, chain_db, memo, fact('X', 'c', 'd'), 'x1')
    with pytest.raises(LabelMismatchError):
        fact_holds(rrx, chain_db, memo, fact('R', 'b', 'c'), 'x3')


def test_certain_on_chain(rrx, chain_db):
    answer = certain(rrx, chain_db)
    assert answer.value is True
    assert answer.witness == 'a'
    assert answer.method is EvaluationMethod.FIXPOINT
    assert answer.complexity is ComplexityClass.NL_HARD_IN_LFP


def test_fork_blocks_the_root(rrx, forked_db):
    memo = compute_B(rrx, forked_db)
    assert ('a', 0) not in memo
    assert not certain(rrx, forked_db).value
    assert not brute_certain(rrx, forked_db)


def test_frugal_repair_takes_the_dead_end(rrx, forked_db):
    sets = frugal_sets(rrx, forked_db)
    block = sets[('R', ('a',))]
    assert block[fact('R', 'a', 'b')] == frozenset({'x0', 'x1'})
    assert block[fact('R', 'a', 'b2')] == frozenset()
    repair = frugal_repair(rrx, forked_db)
    assert fact('R', 'a', 'b2') in repair
    assert repair.consistent
    assert eval_cq(rrx, repair) is None


def test_cycle_without_leaf_is_not_certain(rrx):
    db = parse_database("R(a; b)\nR(b; a)\n")
    assert not certain(rrx, db).value
    assert not brute_certain(rrx, db)


def test_empty_block_never_admits(rrx):
    db = parse_database("X(c; d)\n")
    memo = compute_B(rrx, db)
    assert memo.constants_at('x0') == frozenset()
    assert memo.constants_at('x2') == frozenset({'c'})


def test_backward_rules_are_needed(rrx, divergent_db):
    assert start_set(rrx, divergent_db) == frozenset({'a'})
    assert compute_B_forward(rrx, divergent_db).constants_at(rrx.root) == frozenset()
    assert brute_certain(rrx, divergent_db)
    assert certain(rrx, divergent_db).value


def test_trace_matches_repair_enumeration(rrx, chain_db, forked_db, divergent_db):
    for db in (chain_db, forked_db, divergent_db):
        assert start_set(rrx, db) == brute_start_set(rrx, db)
        assert certain_trace(rrx, db) == bool(brute_start_set(rrx, db))


def test_frugal_repair_of_symmetric_query(sample):
    _, db = sample
    q = parse_tree_query("C(R(A,B),R(A,B))")
    repair = frugal_repair(q, db)
    assert fact('R', 'x1', 'b', 'a') in repair
    assert fact('R', 'x2', 'b', 'a') in repair
    assert (eval_cq(q, repair) is not None) == brute_certain(q, db)


def test_incomparable_frugal_sets(sample):
    q, _ = sample
    db = parse_database("R(k; a, b)\nR(k; b, a)\nA(a)\nB(b)\n")
    with pytest.raises(FrugalComparabilityError) as info:
        frugal_repair(q, db)
    assert info.value.block == "R(k,*)"


def test_auto_method_follows_the_conditions(sample, rrx, chain_db):
    q, db = sample
    answer = certain(q, db)
    assert answer.method is EvaluationMethod.ORACLE
    assert answer.value is False
    assert answer.repairs_checked >= 1
    assert answer.witness is None

    fo = parse_tree_query("R(A,_)")
    answer = certain(fo, parse_database("R(a; b, c)\nA(b)\n"))
    assert answer.method is EvaluationMethod.FORWARD
    assert answer.value is True


def test_methods_outside_their_condition(sample, rrx, chain_db):
    q, db = sample
    with pytest.raises(MethodConditionError):
        certain(q, db, method='fixpoint')
    with pytest.raises(MethodConditionError):
        certain(rrx, chain_db, method='forward')
    forced = certain(rrx, chain_db, method='forward', force=True)
    assert forced.method is EvaluationMethod.FORWARD
    assert certain(rrx, chain_db, method='oracle').value is True


def test_fact_and_pairs_move_up_the_preorder(rng):
    for _ in range(25):
        q = random_query_where(rng, satisfies_c2, 6)
        db = random_database(rng, q, max_adom=4, max_block=2, max_repairs=64)
        memo = compute_B(q, db)
        for vs in label_groups(q).values():
            for x, y in itertools.permutations(vs, 2):
                if not preorder_le(q, x, y):
                    continue
                assert memo.constants_at(x) <= memo.constants_at(y)
                for f in db.facts:
                    if f.relation == x.label.name and len(f.key) == 1 and fact_holds(q, db, memo, f, x):
                        assert fact_holds(q, db, memo, f, y), (q.to_string(), f.render(), x.name, y.name)
