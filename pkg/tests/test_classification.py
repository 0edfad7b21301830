"""Tests for rewinding, the syntactic conditions and the complexity classes."""

import pytest

from cqa_trees.core.exceptions import LabelMismatchError, NotGraphBCQError
from cqa_trees.models import parse_graph_query, parse_tree_query, tree_to_graph
from cqa_trees.services.classification import (
    ComplexityClass,
    berge_acyclic,
    check_conditions,
    classify,
    classify_graph,
    classify_tree,
    connected_components,
    direct_conditions,
    is_tree_query,
    maps_into_rewind,
    preorder_le,
    rewind,
    same_label_pairs,
)
from cqa_trees.services.fuzzing import GRAMMAR_EXAMPLE_QUERY, GOLDEN_GRAPHS, GOLDEN_TREES, random_tree_query
from cqa_trees.services.homomorphism import TreeMatcher


@pytest.mark.parametrize("text,expected", GOLDEN_TREES)
def test_golden_tree_classes(text, expected):
    assert classify_tree(parse_tree_query(text)).complexity is expected


@pytest.mark.parametrize("text,expected", GOLDEN_GRAPHS)
def test_golden_graph_classes(text, expected):
    assert classify_graph(parse_graph_query(text)).complexity is expected


def test_rewind_replaces_subtree(rrx):
    rewound = rewind(rrx, 'x1', 'x0')
    assert rewound.to_string() == "R(R(R(X(_))))"
    assert rewound.resolve(1).name == 'x1'
    assert rewound.root.name == 'x0'
    assert len(set(rewound.variables())) == len(rewound.variables())


def test_rewind_requires_same_label(rrx):
    with pytest.raises(LabelMismatchError):
        rewind(rrx, 'x2', 'x0')


def test_chain_violates_prefix_only(rrx):
    report = check_conditions(rrx)
    assert report.c_branch and report.c_factor
    assert not report.c_prefix
    assert (report.c1, report.c2) == (False, True)
    assert [w.render() for w in report.witnesses] == ["c_prefix:R(x0,x1)"]


def test_swapped_children_violate_branch(sample):
    q, _ = sample
    report = check_conditions(q)
    assert not report.c_branch
    assert [w.render() for w in report.witnesses_for('c_branch')] == ["c_branch:R(x1,x2)"]


def test_decomposition_agrees_with_definitions():
    for text in (GRAMMAR_EXAMPLE_QUERY, "C(R(A,B),R(A,B))", "R(R(X(_)))", "R(S(R(A,_),_),R(_,_))"):
        q = parse_tree_query(text)
        report = check_conditions(q, verify=False)
        assert direct_conditions(q) == (report.c1, report.c2)


def test_selfjoin_free_tree_is_fo():
    result = classify_tree(parse_tree_query("R(S(A,_),T('c'))"))
    assert result.complexity is ComplexityClass.FO
    assert result.conditions.witnesses == ()


def test_rewinding_for_incomparable_pairs():
    q = parse_tree_query(GRAMMAR_EXAMPLE_QUERY)
    matcher = TreeMatcher(q, q)
    pairs = [(x, y) for x, y in same_label_pairs(q) if q.incomparable(x, y)]
    assert pairs
    for x, y in pairs:
        assert maps_into_rewind(q, y, x, False) == matcher.feasible(y, x)
        assert maps_into_rewind(q, x, y, False) == matcher.feasible(x, y)


def test_preorder(rrx, sample):
    assert preorder_le(rrx, 'x0', 'x1')
    assert not preorder_le(rrx, 'x1', 'x0')
    q, _ = sample
    assert not preorder_le(q, 'x1', 'x2')
    assert not preorder_le(q, 'x2', 'x1')
    with pytest.raises(LabelMismatchError):
        preorder_le(rrx, 'x0', 'x2')


def test_complexity_order():
    assert ComplexityClass.FO < ComplexityClass.NL_HARD_IN_LFP < ComplexityClass.CONP_COMPLETE
    assert max(ComplexityClass, key=lambda c: c.rank) is ComplexityClass.CONP_COMPLETE


def test_components_and_acyclicity():
    q = parse_graph_query("R(x; y), S(u; v), T(y; w)")
    components = connected_components(q)
    assert [c.render() for c in components] == ["R(x; y), T(y; w)", "S(u; v)"]
    assert berge_acyclic(q)
    assert not berge_acyclic(parse_graph_query("R(x; y), S(y; x)"))


def test_tree_representation_of_graph():
    tree = is_tree_query(parse_graph_query("R(x; y, 'c'), A(y;)"))
    assert tree is not None
    assert tree.to_string() == "R(A,'c')"
    assert is_tree_query(parse_graph_query("R(x; z), S(y; z)")) is None


def test_graph_classification_reports_components():
    result = classify_graph(parse_graph_query("R(x; z), R(y; z)"))
    assert result.core == "R(y; z)"
    assert len(result.components) == 1
    assert result.components[0].tree == "R(_)"
    assert not result.upper_bound_open


def test_cycle_leaves_upper_bound_open():
    result = classify_graph(parse_graph_query("R(x; y, z), R(z; x, y)"))
    assert result.upper_bound_open
    assert result.components[0].berge_acyclic is False
    assert result.components[0].strong_cycle is not None


def test_hardest_component_wins():
    result = classify_graph(parse_graph_query("R(x; z), S(y; z), T(u; v)"))
    assert result.complexity is ComplexityClass.CONP_COMPLETE
    assert len(result.components) == 2


def test_graph_classification_requires_simple_keys():
    with pytest.raises(NotGraphBCQError):
        classify_graph(parse_graph_query("R(x, y; z)"))


def test_classify_dispatches(rrx):
    assert classify(rrx) is ComplexityClass.NL_HARD_IN_LFP
    assert classify(parse_graph_query("R(x; y)")) is ComplexityClass.FO


def test_classification_is_counted(rrx):
    from prometheus_client import REGISTRY

    labels = {'complexity': 'NL_HARD_IN_LFP'}
    before = REGISTRY.get_sample_value('cqa_classifications_total', labels) or 0.0
    classify_tree(rrx)
    assert REGISTRY.get_sample_value('cqa_classifications_total', labels) == before + 1


def test_tree_and_graph_classification_agree(rng):
    for _ in range(60):
        t = random_tree_query(rng, 6)
        as_graph = classify_graph(tree_to_graph(t), verify=False)
        assert as_graph.complexity is classify_tree(t, verify=False).complexity, t.to_string()
        assert len(as_graph.components) == 1
        assert as_graph.components[0].tree is not None
