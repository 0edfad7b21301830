"""Tests for attack graphs of self-join-free queries."""

import networkx as nx
import pytest

from cqa_trees.core.exceptions import SelfJoinError
from cqa_trees.models import parse_graph_query
from cqa_trees.services.attack_graph import AttackStrength, attack_graph, attribute_closure


def test_attribute_closure_follows_chained_dependencies():
    fds = [(frozenset({'x'}), frozenset({'x', 'y'})), (frozenset({'y'}), frozenset({'y', 'z'}))]
    assert attribute_closure({'x'}, fds) == frozenset({'x', 'y', 'z'})
    assert attribute_closure({'z'}, fds) == frozenset({'z'})


def test_shared_non_key_variable_gives_strong_cycle():
    graph = attack_graph(parse_graph_query("R(x; z), S(y; z)"))
    assert graph.closures == {'R': frozenset({'x'}), 'S': frozenset({'y'})}
    assert graph.attacks('R', 'S') and graph.attacks('S', 'R')
    assert {e.strength for e in graph.edges} == {AttackStrength.STRONG}
    assert graph.strong_cycle() == ('R', 'S')
    assert not graph.is_acyclic()


def test_path_query_has_single_weak_attack():
    graph = attack_graph(parse_graph_query("R(x; y), S(y; z)"))
    assert [(e.source, e.target, e.strength) for e in graph.edges] == [('R', 'S', AttackStrength.WEAK)]
    assert graph.is_acyclic()
    assert not graph.has_strong_cycle()
    assert graph.summary() == {'atoms': 2, 'edges': 1, 'acyclic': True, 'strong_cycle': False}


def test_renamed_self_join_has_only_weak_cycle():
    sjf, correspondence = parse_graph_query("R(x; y, z), R(z; x, y)").self_join_free()
    assert set(correspondence) == {'R_0', 'R_1'}
    graph = attack_graph(sjf)
    assert graph.attacks('R_0', 'R_1') and graph.attacks('R_1', 'R_0')
    assert not graph.has_strong_cycle()


def test_networkx_view_keeps_strength():
    graph = attack_graph(parse_graph_query("R(x; z), S(y; z)")).to_networkx()
    assert isinstance(graph, nx.DiGraph)
    assert graph.edges['R', 'S']['strength'] == 'strong'


def test_self_joins_are_rejected():
    with pytest.raises(SelfJoinError):
        attack_graph(parse_graph_query("R(x; y), R(y; z)"))
