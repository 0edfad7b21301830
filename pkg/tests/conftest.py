"""Shared fixtures: the small queries and instances most tests start from."""

import random

import pytest

from cqa_trees.config import FuzzConfig
from cqa_trees.models import parse_database, parse_tree_query
from cqa_trees.services.gadgets import fig5_instance

RRX = "R(R(X(_)))"


@pytest.fixture
def rrx():
    return parse_tree_query(RRX)


@pytest.fixture
def chain_db():
    return parse_database("R(a; b)\nR(b; c)\nX(c; d)\n")


@pytest.fixture
def forked_db():
    return parse_database("R(a; b)\nR(a; b2)\nR(b; c)\nX(c; d)\n")


@pytest.fixture
def divergent_db():
    """Certain for R(R(X(_))) only through a backward rule."""
    return parse_database(
        """
        R(a; b)
        R(b; c1)
        R(b; c2)
        X(c1; e)
        R(c2; d)
        X(d; e)
        """
    )


@pytest.fixture
def sample():
    return fig5_instance()


@pytest.fixture
def rng():
    return random.Random(7)


@pytest.fixture
def small_fuzz():
    return FuzzConfig(
        seed=11, cases=40, tree_cases=40, max_vertices=6,
        max_adom=4, max_block=2, max_repairs=64,
        max_dag_vertices=3, max_cnf_variables=2, max_cnf_clauses=2,
    )
