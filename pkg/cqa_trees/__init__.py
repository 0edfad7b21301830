"""Consistent query answering for rooted tree queries under primary keys."""

__version__ = '0.1.0'

from .core.logging import LogManager, get_logger
from .core.exceptions import CQAError
from .models import Database, Fact, GraphQuery, TreeQuery, fact, parse_database, parse_graph_query, parse_tree_query
from .services.classification import ComplexityClass, check_conditions, classify, classify_graph, classify_tree
from .services.engine import CertainAnswer, certain, compute_B, frugal_repair
from .services.oracle import brute_certain

# Initialize logging with default settings
LogManager.configure_logging()
logger = get_logger('cqa_trees')

__all__ = [
    '__version__',
    'CQAError',
    'Database',
    'Fact',
    'GraphQuery',
    'TreeQuery',
    'fact',
    'parse_database',
    'parse_graph_query',
    'parse_tree_query',
    'ComplexityClass',
    'check_conditions',
    'classify',
    'classify_graph',
    'classify_tree',
    'CertainAnswer',
    'certain',
    'compute_B',
    'frugal_repair',
    'brute_certain',
]
