"""Tests for the command-line interface."""

import json

import pytest

from cqa_trees.cli import EXIT_ERROR, EXIT_FALSE, EXIT_TRUE, main
from cqa_trees.models import parse_database
from cqa_trees.services.gadgets import fig5_instance

RRX = "R(R(X(_)))"


@pytest.fixture
def chain_file(tmp_path, chain_db):
    path = tmp_path / 'chain.facts'
    path.write_text(chain_db.to_text())
    return str(path)


@pytest.fixture
def forked_file(tmp_path, forked_db):
    path = tmp_path / 'forked.facts'
    path.write_text(forked_db.to_text())
    return str(path)


def test_classify_tree(capsys):
    assert main(['classify', RRX]) == EXIT_TRUE
    out = capsys.readouterr().out
    assert "class: NL_HARD_IN_LFP" in out
    assert "c_prefix: false" in out


def test_classify_graph_json(capsys):
    assert main(['--format', 'json', 'classify', '--graph', "R(x; z), S(y; z)"]) == EXIT_TRUE
    data = json.loads(capsys.readouterr().out)
    assert data['result']['class'] == 'CONP_COMPLETE'
    assert data['command'] == 'classify'


def test_query_from_file(tmp_path, capsys):
    path = tmp_path / 'q.txt'
    path.write_text(RRX + "\n")
    assert main(['classify', str(path)]) == EXIT_TRUE
    assert f"query: {RRX}" in capsys.readouterr().out


def test_certain_exit_codes(chain_file, forked_file, capsys):
    assert main(['certain', RRX, chain_file]) == EXIT_TRUE
    out = capsys.readouterr().out
    assert "certain: true" in out
    assert "witness: a" in out
    assert "method: fixpoint" in out
    assert main(['certain', RRX, forked_file]) == EXIT_FALSE


def test_certain_method_outside_condition(chain_file, capsys):
    assert main(['certain', RRX, chain_file, '--method', 'forward']) == EXIT_ERROR
    assert "Precondition failed" in capsys.readouterr().err
    assert main(['certain', RRX, chain_file, '--method', 'forward', '--force']) == EXIT_TRUE


def test_oracle_and_cap(forked_file, capsys):
    assert main(['oracle', RRX, forked_file]) == EXIT_FALSE
    assert "falsifying_repair: R(a; b2), R(b; c), X(c; d)" in capsys.readouterr().out
    assert main(['oracle', RRX, forked_file, '--cap', '1']) == EXIT_ERROR
    assert "Oracle cap exceeded" in capsys.readouterr().err


def test_oracle_trace(chain_file, capsys):
    assert main(['oracle', RRX, chain_file, '--trace']) == EXIT_TRUE
    assert "start_set: a" in capsys.readouterr().out


def test_frugal(forked_file, capsys):
    assert main(['frugal', RRX, forked_file, '--sets']) == EXIT_TRUE
    out = capsys.readouterr().out
    assert "frugal_repair: R(a; b2), R(b; c), X(c; d)" in out
    assert "R(a; b) -> {x0, x1}" in out


@pytest.mark.parametrize('kind', ['fig5', 'sample'])
def test_gadget_fig5_to_file(kind, tmp_path, capsys):
    out_path = tmp_path / 'fig5.facts'
    assert main(['gadget', kind, '--out', str(out_path)]) == EXIT_TRUE
    _, db = fig5_instance()
    written = parse_database(out_path.read_text())
    assert written == db
    assert len(written) == 12
    assert "repairs: 16" in capsys.readouterr().out


def test_gadget_sat_and_reach(capsys):
    assert main(['gadget', 'sat', '--cnf', '(x1)&(~x1)']) == EXIT_TRUE
    assert "g.sat.clause.0" in capsys.readouterr().out
    assert main(['gadget', 'reach', '--edges', 's>t']) == EXIT_TRUE
    assert "g.reach.terminal.1" in capsys.readouterr().out
    assert main(['gadget', 'reach']) == EXIT_ERROR
    assert "--edges is required" in capsys.readouterr().err


def test_selftest_subset(capsys):
    assert main(['selftest', '--check', 'golden_classes', '--check', 'cfg_example', '--no-progress']) == EXIT_TRUE
    out = capsys.readouterr().out
    assert "passed: true" in out
    assert "golden_classes: 0/3" in out


def test_parse_error(capsys):
    assert main(['classify', "R(A,"]) == EXIT_ERROR
    assert "Parse error" in capsys.readouterr().err


def test_missing_file_is_an_error(capsys):
    assert main(['certain', RRX, '/nonexistent/db.facts']) == EXIT_ERROR


def test_no_command(capsys):
    assert main([]) == EXIT_ERROR
