"""Tests for the tree grammar of a query."""

import pytest

from cqa_trees.core.exceptions import ArityError, InconsistentDatabaseError
from cqa_trees.models import TreeQuery, parse_tree_query
from cqa_trees.services.classification import check_conditions, rewind
from cqa_trees.services.grammar import (
    accepted_constants,
    accepts_in_consistent,
    build_cfg,
    derives,
    enumerate_derivations,
    render_sketch,
)
from cqa_trees.services.fuzzing import (
    GRAMMAR_EXAMPLE_ACCEPTED,
    GRAMMAR_EXAMPLE_QUERY,
    GRAMMAR_EXAMPLE_REJECTED,
    random_tree_query,
)
from cqa_trees.services.homomorphism import tree_hom


@pytest.fixture
def example_cfg():
    return build_cfg(parse_tree_query(GRAMMAR_EXAMPLE_QUERY))


def test_rules_of_chain(rrx):
    assert build_cfg(rrx).rules() == [
        "S_x0 -> R(S_x1)",
        "S_x1 -> R(S_x2)",
        "S_x2 -> X(S_x3)",
        "S_x3 -> _",
        "S_x1 -> S_x0",
    ]


def test_backward_rules_only_to_same_label_ancestors(example_cfg):
    q = example_cfg.query
    assert example_cfg.backward == {q.resolve('x3').index: (q.resolve('x1').index,)}


def test_query_derives_itself(example_cfg):
    assert derives(example_cfg, example_cfg.start, GRAMMAR_EXAMPLE_QUERY)


def test_backward_step_accepts_repeated_prefix(example_cfg):
    assert derives(example_cfg, example_cfg.start, GRAMMAR_EXAMPLE_ACCEPTED)


def test_child_order_matters(example_cfg):
    assert not derives(example_cfg, example_cfg.start, GRAMMAR_EXAMPLE_REJECTED)


def test_derives_checks_schema(rrx):
    with pytest.raises(ArityError):
        derives(build_cfg(rrx), 0, "R(A,B)")


def test_enumerate_derivations_respects_budget(rrx):
    g = build_cfg(rrx)
    assert [render_sketch(s) for s in enumerate_derivations(g, 0, 0)] == ["R(R(X(_)))"]
    assert [render_sketch(s) for s in enumerate_derivations(g, 0, 1)] == ["R(R(R(X(_))))", "R(R(X(_)))"]
    for s in enumerate_derivations(g, 0, 2):
        assert derives(g, 0, s)


def test_acceptance_in_consistent_instance(rrx, chain_db):
    g = build_cfg(rrx)
    assert accepts_in_consistent(g, 'x0', 'a', chain_db)
    assert not accepts_in_consistent(g, 'x0', 'b', chain_db)
    assert accepted_constants(g, 'x1', chain_db) == frozenset({'a', 'b'})
    assert accepts_in_consistent(g, 'x3', 'anything', chain_db)


def test_acceptance_requires_consistency(rrx, forked_db):
    with pytest.raises(InconsistentDatabaseError):
        accepts_in_consistent(build_cfg(rrx), 'x0', 'a', forked_db)


def test_factor_violation_is_derived_by_the_grammar():
    q = parse_tree_query("S(R(R(A)))")
    report = check_conditions(q, verify=False)
    assert not report.c_factor
    g = build_cfg(q)
    [witness] = [w for w in report.witnesses if w.condition == 'c_factor']
    rewound = rewind(q, witness.y, witness.x)
    assert rewound.to_string() == "S(R(R(R(A))))"
    assert derives(g, g.start, rewound)
    assert tree_hom(q, rewound) is None


def test_factor_condition_matches_derived_trees(rng):
    for _ in range(60):
        q = random_tree_query(rng, 6)
        report = check_conditions(q, verify=False)
        g = build_cfg(q)
        if report.c_factor:
            for s in enumerate_derivations(g, g.start, 2):
                assert tree_hom(q, TreeQuery.from_sketch(s)) is not None, render_sketch(s)
        else:
            for w in report.witnesses:
                if w.condition == 'c_factor':
                    rewound = rewind(q, w.y, w.x)
                    assert derives(g, g.start, rewound)
                    assert tree_hom(q, rewound) is None
