"""Classification, evaluation and instance generation services."""

from .homomorphism import TreeMatcher, core, cq_hom, is_minimal, tree_hom
from .attack_graph import AttackGraph, attack_graph
from .classification import (
    ComplexityClass,
    ConditionReport,
    GraphClassification,
    TreeClassification,
    WitnessPair,
    check_conditions,
    classify,
    classify_graph,
    classify_tree,
    connected_components,
    is_tree_query,
    preorder_le,
    rewind,
)
from .grammar import TreeCFG, accepts_in_consistent, build_cfg, derives
from .engine import CertainAnswer, CertMemo, certain, certain_trace, compute_B, compute_B_forward, frugal_repair
from .oracle import brute_certain, brute_certain_trace, enumerate_repairs, eval_cq
from .gadgets import MonotoneCNF, Digraph, canonical_copy, reach_gadget, sat_gadget, fig5_instance, sjf_lift

__all__ = [
    'TreeMatcher',
    'core',
    'cq_hom',
    'is_minimal',
    'tree_hom',
    'AttackGraph',
    'attack_graph',
    'ComplexityClass',
    'ConditionReport',
    'GraphClassification',
    'TreeClassification',
    'WitnessPair',
    'check_conditions',
    'classify',
    'classify_graph',
    'classify_tree',
    'connected_components',
    'is_tree_query',
    'preorder_le',
    'rewind',
    'TreeCFG',
    'accepts_in_consistent',
    'build_cfg',
    'derives',
    'CertainAnswer',
    'CertMemo',
    'certain',
    'certain_trace',
    'compute_B',
    'compute_B_forward',
    'frugal_repair',
    'brute_certain',
    'brute_certain_trace',
    'enumerate_repairs',
    'eval_cq',
    'MonotoneCNF',
    'Digraph',
    'canonical_copy',
    'reach_gadget',
    'sat_gadget',
    'fig5_instance',
    'sjf_lift',
]
