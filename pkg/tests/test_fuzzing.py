"""Tests for the seeded corpora and the selftest suite."""

import random

import pytest

from cqa_trees.core.exceptions import CQAError
from cqa_trees.models import parse_graph_query
from cqa_trees.services.fuzzing import (
    SelfTestSuite,
    LIFT_QUERIES,
    monotone_cnfs,
    random_database,
    random_graph_database,
    random_query_where,
    random_tree_query,
    satisfies_c2,
    small_dags,
)


def test_random_trees_are_reproducible():
    first = [random_tree_query(random.Random(3), 6).to_string() for _ in range(5)]
    second = [random_tree_query(random.Random(3), 6).to_string() for _ in range(5)]
    assert first == second


def test_random_trees_respect_size(rng):
    for _ in range(200):
        q = random_tree_query(rng, 6)
        assert len(q) <= 6
        assert q.root.is_internal


def test_random_query_where_filters(rng):
    for _ in range(20):
        assert satisfies_c2(random_query_where(rng, satisfies_c2, 6))


def test_random_query_where_gives_up(rng):
    with pytest.raises(CQAError):
        random_query_where(rng, lambda q: False, 4, attempts=3)


def test_random_database_fits_schema_and_cap(rng):
    for _ in range(50):
        q = random_tree_query(rng, 6)
        db = random_database(rng, q, max_adom=4, max_block=3, max_repairs=32)
        assert db.repair_count <= 32
        assert db.relations() <= set(q.relations()) | set(q.unary_relations())


def test_cnf_family_is_deduplicated():
    formulas = monotone_cnfs(2, 1)
    assert len(formulas) == 6
    assert len({phi.render() for phi in formulas}) == len(formulas)


def test_small_dags_cover_every_endpoint_choice():
    graphs = small_dags(2)
    assert len(graphs) == 9
    assert all(g.is_acyclic() for g in graphs)


def test_fixed_checks_pass(small_fuzz):
    suite = SelfTestSuite(progress=False, settings=small_fuzz)
    report = suite.run(['golden_classes', 'sample_instance', 'cfg_example', 'graphbcq_examples'])
    assert report.passed
    assert [c.name for c in report.checks] == ['golden_classes', 'sample_instance', 'cfg_example', 'graphbcq_examples']
    assert report.table().endswith("PASS")


def test_differential_checks_pass(small_fuzz):
    suite = SelfTestSuite(progress=False, settings=small_fuzz)
    report = suite.run(['engine_oracle', 'fixpoint_pairs', 'frugal_universality', 'forward_fixpoint'])
    assert report.passed, report.table()
    assert report.checks[0].cases == small_fuzz.cases


def test_query_level_checks_pass(small_fuzz):
    suite = SelfTestSuite(progress=False, settings=small_fuzz)
    report = suite.run(['rewinding_closure', 'preorder_total'])
    assert report.passed, report.table()


def test_gadget_sweeps_pass(small_fuzz):
    suite = SelfTestSuite(progress=False, settings=small_fuzz)
    report = suite.run(['sat_gadget', 'reach_gadget'])
    assert report.passed, report.table()
    assert report.checks[1].cases == len(small_dags(small_fuzz.max_dag_vertices))


def test_seed_fixes_the_corpus(small_fuzz):
    one = SelfTestSuite(seed=5, progress=False, settings=small_fuzz).corpus()
    two = SelfTestSuite(seed=5, progress=False, settings=small_fuzz).corpus()
    assert [(q.to_string(), db.to_text()) for q, db in one] == [(q.to_string(), db.to_text()) for q, db in two]


def test_scale_shrinks_case_counts(small_fuzz):
    suite = SelfTestSuite(scale=0.25, progress=False, settings=small_fuzz)
    assert len(suite.corpus()) == 10


def test_unknown_check(small_fuzz):
    with pytest.raises(CQAError):
        SelfTestSuite(progress=False, settings=small_fuzz).run(['no_such_check'])


def test_random_graph_database_fits_schema(rng):
    for text in LIFT_QUERIES:
        sjf, _ = parse_graph_query(text).self_join_free()
        for _ in range(20):
            db = random_graph_database(rng, sjf, max_adom=3, max_block=2, max_repairs=16)
            assert db.repair_count <= 16
            assert all(f.shape == sjf.schema[f.relation] for f in db.facts)


def test_property_checks_pass(small_fuzz):
    suite = SelfTestSuite(progress=False, settings=small_fuzz)
    names = ['chain_property', 'cfg_factor', 'hom_agreement', 'graph_view', 'core_stability', 'sjf_lift']
    report = suite.run(names)
    assert report.passed, report.table()
    assert [c.name for c in report.checks] == names
    assert report.checks[3].cases == small_fuzz.tree_cases
