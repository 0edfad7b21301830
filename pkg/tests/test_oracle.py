"""Tests for repair enumeration and the brute-force oracle."""

import pytest

from cqa_trees.core.exceptions import OracleCapExceeded
from cqa_trees.models import fact, parse_database, parse_graph_query, parse_tree_query
from cqa_trees.services.engine import certain
from cqa_trees.services.oracle import (
    brute_certain,
    brute_certain_report,
    brute_certain_trace,
    enumerate_repairs,
    eval_cq,
)


def test_repairs_pick_one_fact_per_block(sample):
    _, db = sample
    repairs = list(enumerate_repairs(db))
    assert len(repairs) == 16 == db.repair_count
    assert all(r.consistent and len(r) == len(db.blocks) for r in repairs)
    assert len(set(repairs)) == 16


def test_cap_is_enforced(sample):
    _, db = sample
    with pytest.raises(OracleCapExceeded) as info:
        enumerate_repairs(db, cap=10)
    assert (info.value.repair_count, info.value.cap) == (16, 10)


def test_eval_cq_returns_valuation(rrx, chain_db):
    assert eval_cq(rrx, chain_db) == {'x0': 'a', 'x1': 'b', 'x2': 'c', 'x3': 'd'}
    assert eval_cq(rrx, parse_database("R(a; b)\n")) is None


def test_eval_cq_respects_constants():
    q = parse_graph_query("R(x; 'c')")
    assert eval_cq(q, parse_database("R(a; c)\n")) == {'x': 'a'}
    assert eval_cq(q, parse_database("R(a; d)\n")) is None


def test_report_names_the_falsifying_repair(rrx, forked_db):
    report = brute_certain_report(rrx, forked_db)
    assert report.value is False
    assert report.repair_count == 2
    assert fact('R', 'a', 'b2') in report.falsifying_repair


def test_certain_stops_only_after_every_repair(rrx, divergent_db):
    report = brute_certain_report(rrx, divergent_db)
    assert report.value is True
    assert report.repairs_checked == report.repair_count == 2
    assert report.falsifying_repair is None


def test_graph_query_join_on_non_key():
    q = parse_graph_query("R(x; z), S(y; z)")
    assert not brute_certain(q, parse_database("R(a; c)\nR(a; d)\nS(b; c)\n"))
    assert brute_certain(q, parse_database("R(a; c)\nR(a; d)\nS(b; c)\nS(e; d)\n"))


def test_facts_with_other_key_arity_never_match():
    q = parse_tree_query("R(_,_)")
    db = parse_database("R(a, b; c)\n")
    assert not eval_cq(q.to_graph(), db)
    assert brute_certain(q.to_graph(), db) is False
    assert certain(q, db).value is False
    assert certain(q, db, method='oracle').value is False


def test_trace_oracle(rrx, divergent_db, forked_db):
    assert brute_certain_trace(rrx, divergent_db)
    assert not brute_certain_trace(rrx, forked_db)
