"""Prometheus metrics for classification and evaluation."""

from prometheus_client import Counter, Histogram

# Homomorphism search
HOM_CHECKS = Counter(
    'cqa_hom_checks_total',
    'Total number of homomorphism existence checks',
    ['kind']  # tree, cq
)

# Fixpoint evaluation
FIXPOINT_ROUNDS = Histogram(
    'cqa_fixpoint_rounds',
    'Rounds until the certain-trace fixpoint stabilized',
    ['variant'],  # backward, forward
    buckets=(1, 2, 4, 8, 16, 32, 64, 128)
)

FIXPOINT_PAIRS = Histogram(
    'cqa_fixpoint_pairs',
    'Size of the final pair set of the fixpoint',
    buckets=(10, 50, 100, 500, 1000, 5000, 10000)
)

# Oracle
REPAIRS_ENUMERATED = Counter(
    'cqa_repairs_enumerated_total',
    'Total number of repairs yielded by the oracle'
)

ORACLE_DURATION = Histogram(
    'cqa_oracle_duration_seconds',
    'Duration of brute-force certainty checks',
    buckets=(0.001, 0.01, 0.1, 0.5, 1.0, 5.0, 30.0)
)

# Classification
CLASSIFICATIONS = Counter(
    'cqa_classifications_total',
    'Total number of classifications by resulting class',
    ['complexity']
)

FRUGAL_VIOLATIONS = Counter(
    'cqa_frugal_violations_total',
    'Blocks whose frugal sets were found incomparable'
)
