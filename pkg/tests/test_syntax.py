"""Tests for the query and fact-file syntaxes."""

import pytest

from cqa_trees.core.exceptions import ArityError, ParseError, ValidationError
from cqa_trees.models import (
    Database,
    TreeQuery,
    fact,
    parse_database,
    parse_graph_query,
    parse_tree_query,
    serialize_tree_query,
    tree_sketch,
    tree_to_graph,
)
from cqa_trees.services.classification import is_tree_query
from cqa_trees.services.fuzzing import GRAMMAR_EXAMPLE_QUERY, random_tree_query


def test_vertices_are_named_breadth_first_skipping_constants():
    q = parse_tree_query(GRAMMAR_EXAMPLE_QUERY)
    assert len(q) == 13
    assert q.root.name == 'x0'
    assert [v.label.render() for v in q.vertices[:4]] == ['A', 'R', 'R', 'R']
    assert q.resolve('x3').parent == 1
    constant = next(v for v in q if v.is_constant)
    assert constant.name is None
    assert q.constants() == ['c1', 'c2']


def test_to_string_is_whitespace_normal():
    q = parse_tree_query("A( R(R(U, _), X('c1')) , R(Y(_), Z('c2', _)) )")
    assert q.to_string() == GRAMMAR_EXAMPLE_QUERY
    assert parse_tree_query(q.to_string()) == q


def test_tree_query_rejects_bottom_root():
    with pytest.raises(ParseError):
        parse_tree_query("_")


def test_tree_query_rejects_syntax_error():
    with pytest.raises(ParseError) as info:
        parse_tree_query("R(A,")
    assert info.value.error_code is not None


def test_tree_query_rejects_arity_clash():
    with pytest.raises(ArityError):
        parse_tree_query("R(R(A,B))")


def test_tree_query_rejects_unary_and_internal_use():
    with pytest.raises(ArityError):
        parse_tree_query("R(R,_)")


def test_subtree_keeps_names(rrx):
    sub = rrx.subtree('x1')
    assert sub.to_string() == "R(X(_))"
    assert sub.root.name == 'x1'


def test_atoms_of_tree(rrx):
    atoms = rrx.to_graph().atoms
    assert [a.render() for a in atoms] == ["R(x0; x1)", "R(x1; x2)", "X(x2; x3)"]


def test_tree_to_graph_lists_one_atom_per_labeled_vertex():
    atoms = tree_to_graph(parse_tree_query("C(R(A,B),R(B,A))")).atoms
    assert [a.render() for a in atoms] == [
        "C(x0; x1, x2)", "R(x1; x3, x4)", "R(x2; x5, x6)",
        "A(x3;)", "B(x4;)", "B(x5;)", "A(x6;)",
    ]
    assert [a.render() for a in tree_to_graph(parse_tree_query("R(_)")).atoms] == ["R(x0; x1)"]


def test_unary_leaf_is_a_unary_atom():
    q = parse_tree_query("R(A,'c')")
    assert [a.render() for a in q.to_graph().atoms] == ["R(x0; x1, 'c')", "A(x1;)"]


def test_graph_query_parse():
    q = parse_graph_query("R(x; y, 'c'), S(y; z)")
    assert len(q) == 2
    assert q.variables() == ['x', 'y', 'z']
    assert q.constants() == ['c']
    assert q.is_graphbcq


def test_graph_query_reports_composite_key():
    q = parse_graph_query("R(x, y; z)")
    assert not q.is_graphbcq
    assert "key arity 2" in q.graphbcq_violations()[0]


def test_parse_database_with_comments_and_plain_facts():
    db = parse_database("R(a; b)   # first\n\nA(c)\nR(a; 'b c')\n")
    assert fact('A', 'c') in db
    assert fact('R', 'a', 'b c') in db
    assert len(db.blocks) == 2
    assert db.repair_count == 2


def test_parse_database_reports_arity_clash_with_line():
    with pytest.raises(ArityError) as info:
        parse_database("R(a; b)\nR(a; b, c)\n")
    assert info.value.line == 2


def test_parse_database_syntax_error_has_line():
    with pytest.raises(ParseError) as info:
        parse_database("R(a; b)\nR(a; b\n")
    assert info.value.line == 2


def test_database_text_round_trip():
    db = parse_database("R(b; c)\nR(a; b)\nX(c; 'd e')\n")
    assert db.to_text() == "R(a; b)\nR(b; c)\nX(c; 'd e')\n"
    assert parse_database(db.to_text()) == db


def test_database_summary_counts_blocks(forked_db):
    assert forked_db.summary() == {'facts': 4, 'blocks': 3, 'inconsistent_blocks': 1, 'repairs': 2}


def test_restrict_rejects_foreign_fact(chain_db):
    with pytest.raises(ValueError):
        chain_db.restrict([fact('R', 'z', 'z')])


def test_database_rejects_mixed_shapes():
    with pytest.raises(ArityError):
        Database.of([fact('R', 'a', 'b'), fact('R', 'a', 'b', 'c')])


def test_tree_sketch_allows_any_root():
    assert tree_sketch("'c'").label.name == 'c'


def test_resolve_unknown_vertex(rrx):
    with pytest.raises(ValidationError):
        rrx.resolve('x9')
    assert isinstance(TreeQuery.parse("R(_)"), TreeQuery)


def test_generated_trees_survive_their_string(rng):
    for _ in range(100):
        t = random_tree_query(rng, 8)
        text = serialize_tree_query(t)
        assert parse_tree_query(text) == t
        assert serialize_tree_query(parse_tree_query(text)) == text


def test_atom_set_of_a_tree_reads_back_as_the_tree(rng):
    for _ in range(100):
        t = random_tree_query(rng, 8)
        g = tree_to_graph(t)
        assert g.graphbcq_violations() == []
        back = is_tree_query(g)
        assert back is not None
        assert back.to_string() == t.to_string()
