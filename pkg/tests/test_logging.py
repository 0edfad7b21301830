"""Tests for structured logging and the run id."""

import json
import logging

import pytest

from cqa_trees.core.logging import JsonFormatter, LogManager, PrettyFormatter, get_logger, run_id, set_run_id, with_logging


def _record(message):
    return logging.LogRecord('cqa_trees.services.engine', logging.INFO, __file__, 1, message, None, None)


def test_json_formatter_carries_context_and_run_id():
    set_run_id('abc123')
    entry = json.loads(JsonFormatter().format(_record({'message': 'Fixpoint reached', 'context': {'rounds': 3}})))
    assert entry['message'] == 'Fixpoint reached'
    assert entry['context'] == {'rounds': 3}
    assert entry['run_id'] == 'abc123'
    assert entry['logger'] == 'cqa_trees.services.engine'


def test_pretty_formatter_shortens_logger_name(monkeypatch):
    monkeypatch.setenv('NO_COLOR', '1')
    line = PrettyFormatter().format(_record({'message': 'Fixpoint reached', 'context': {'rounds': 3}}))
    assert 'c.s.engine' in line
    assert 'rounds=3' in line


def test_debug_toggle():
    logger = get_logger('cqa_trees.tests')
    try:
        LogManager.set_debug_logging(True)
        assert logger.is_enabled_for(logging.DEBUG)
        LogManager.set_debug_logging(False)
        assert not logger.is_enabled_for(logging.DEBUG)
    finally:
        LogManager._debug_enabled = None
        LogManager.set_log_level('warning')


def test_with_logging_reraises_and_sets_run_id():
    @with_logging
    def explode():
        raise ValueError("boom")

    run_id.set('')
    with pytest.raises(ValueError, match="boom"):
        explode()
    assert run_id.get() != ''
