"""Seeded random corpora and the selftest suite over them."""

import itertools
import random
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from pydantic import BaseModel, ConfigDict, Field
from tqdm import tqdm

from ..config import FuzzConfig, config
from ..core.exceptions import CQAError
from ..core.logging import get_logger
from ..core.utils import Timer
from ..models import (
    Database,
    Fact,
    GraphQuery,
    Label,
    Sketch,
    TreeQuery,
    Vertex,
    serialize_tree_query,
    tree_to_graph,
)
from .classification import (
    ComplexityClass,
    classify_graph,
    classify_tree,
    is_tree_query,
    maps_into_rewind,
    preorder_le,
    rewind,
    same_label_pairs,
)
from .engine import compute_B, compute_B_forward, fact_holds, frugal_repair, start_set
from .gadgets import (
    Clause,
    Digraph,
    MonotoneCNF,
    reach_gadget,
    sat_gadget,
    fig5_instance,
    satisfiable_sample_repair,
    sjf_lift,
)
from .grammar import accepted_constants, build_cfg, derives, enumerate_derivations, render_sketch
from .homomorphism import TreeMatcher, core, cq_equivalent, cq_hom, tree_hom
from .oracle import QueryEvaluator, brute_certain, enumerate_repairs, eval_cq

logger = get_logger('cqa_trees.services.fuzzing')

RELATIONS = ('R', 'S')
UNARY_RELATIONS = ('A', 'B')
QUERY_CONSTANTS = ('c',)

GRAMMAR_EXAMPLE_QUERY = "A(R(R(U,_),X('c1')),R(Y(_),Z('c2',_)))"
GRAMMAR_EXAMPLE_ACCEPTED = "A(R(R(R(U,_),X('c1')),X('c1')),R(Y(_),Z('c2',_)))"
GRAMMAR_EXAMPLE_REJECTED = "A(R(Y(_),Z('c2',_)),R(R(R(U,_),X('c1')),X('c1')))"

GOLDEN_TREES = (
    ("C(R(A,B),R(B,A))", ComplexityClass.CONP_COMPLETE),
    ("C(R(A,B),R(A,B))", ComplexityClass.FO),
    ("R(R(X(_)))", ComplexityClass.NL_HARD_IN_LFP),
)

GOLDEN_GRAPHS = (
    ("R(x; z), S(y; z)", ComplexityClass.CONP_COMPLETE),
    ("R(x; y, z), R(z; x, y)", ComplexityClass.LHARD_NOT_FO_UPPER_OPEN),
    ("R(x; z), R(y; z)", ComplexityClass.FO),
)

# minimal constant-free queries with self-joins, for the lifting sweep
LIFT_QUERIES = (
    "R(x; y, z), R(z; x, y)",
    "R(x; y), R(y; z)",
    "R(x; y), S(y; z), R(z; u)",
)

# backward steps per enumerated derivation
DERIVATION_BUDGET = 2


def random_tree_query(
    rng: random.Random,
    max_vertices: int = 8,
    relations: Sequence[str] = RELATIONS,
    unary: Sequence[str] = UNARY_RELATIONS,
    constants: Sequence[str] = QUERY_CONSTANTS,
) -> TreeQuery:
    """A random tree query with at most ``max_vertices`` vertices.

    Every relation gets one or two children for the whole query; leaves are
    ⊥, unary or constant.
    """
    arity = {r: rng.choice((1, 2)) if max_vertices >= 3 else 1 for r in relations}
    budget = rng.randint(2, max(2, max_vertices))
    root_label = rng.choice(relations)
    nodes: List[dict] = [{'label': Label.relation(root_label), 'children': []}]
    used = 1 + arity[root_label]
    slots = [nodes[0]] * arity[root_label]
    while slots:
        parent = slots.pop(rng.randrange(len(slots)))
        label = rng.choice(relations)
        node = {'children': []}
        if used + arity[label] <= budget and rng.random() < 0.6:
            node['label'] = Label.relation(label)
            used += arity[label]
            slots.extend([node] * arity[label])
        else:
            kind = rng.choice(('bottom', 'bottom', 'unary', 'constant'))
            if kind == 'unary':
                node['label'] = Label.unary(rng.choice(unary))
            elif kind == 'constant':
                node['label'] = Label.constant(rng.choice(constants))
            else:
                node['label'] = Label.bottom()
        parent['children'].append(node)

    def freeze(node: dict) -> Sketch:
        return Sketch(label=node['label'], children=tuple(freeze(c) for c in node['children']))

    return TreeQuery.from_sketch(freeze(nodes[0]))


def random_query_where(
    rng: random.Random,
    accept: Callable[[TreeQuery], bool],
    max_vertices: int = 8,
    attempts: int = 1000,
) -> TreeQuery:
    """First random tree query passing ``accept``.

    Raises:
        CQAError: If ``attempts`` queries all fail
    """
    for _ in range(attempts):
        q = random_tree_query(rng, max_vertices)
        if accept(q):
            return q
    raise CQAError(f"no random query accepted after {attempts} attempts", error_code="fuzz")


def label_groups(q: TreeQuery) -> Dict[str, List[Vertex]]:
    """Internal vertices of q by relation label, in breadth-first order."""
    groups: Dict[str, List[Vertex]] = {}
    for v in q.internal_vertices():
        groups.setdefault(v.label.name, []).append(v)
    return groups


def satisfies_c2(q: TreeQuery) -> bool:
    return classify_tree(q, verify=False).conditions.c2


def satisfies_c1(q: TreeQuery) -> bool:
    return classify_tree(q, verify=False).conditions.c1


def satisfies_c_branch(q: TreeQuery) -> bool:
    return classify_tree(q, verify=False).conditions.c_branch


def random_database(
    rng: random.Random,
    q: TreeQuery,
    max_adom: int = 6,
    max_block: int = 3,
    max_repairs: int = 4096,
) -> Database:
    """A random instance over the schema of q.

    Half of the instances start from a homomorphic image of q so that
    certain answers are not almost always false. Blocks are shrunk until the
    repair count fits ``max_repairs``.
    """
    pool = [f"d{i}" for i in range(rng.randint(1, max_adom))]
    values = pool + list(q.constants())
    relations = q.relations()
    facts = set()

    if rng.random() < 0.5:
        image = {name: rng.choice(pool) for name in q.variables()}
        for a in q.to_graph().atoms:
            args = [image[t.name] if t.is_variable else t.name for t in a.args]
            facts.add(Fact(relation=a.relation, key=(args[0],), values=tuple(args[1:])))

    for relation, width in sorted(relations.items()):
        for key in pool:
            if rng.random() < 0.5:
                continue
            for _ in range(rng.randint(1, max_block)):
                facts.add(Fact(relation=relation, key=(key,), values=tuple(rng.choice(values) for _ in range(width))))
    for relation in q.unary_relations():
        for key in pool:
            if rng.random() < 0.5:
                facts.add(Fact(relation=relation, key=(key,)))

    return _fit_repairs(rng, facts, max_block, max_repairs)


def _fit_repairs(rng: random.Random, facts: Iterable[Fact], max_block: int, max_repairs: int) -> Database:
    """Shrink blocks to ``max_block`` facts, then the largest ones until the repairs fit."""
    blocks: Dict[Tuple, List[Fact]] = {}
    for f in sorted(facts, key=Fact.sort_key):
        blocks.setdefault(f.block_id, []).append(f)
    for block in blocks.values():
        while len(block) > max_block:
            block.pop(rng.randrange(len(block)))

    def count() -> int:
        total = 1
        for block in blocks.values():
            total *= len(block)
        return total

    while count() > max_repairs:
        largest = max(blocks.values(), key=len)
        largest.pop(rng.randrange(len(largest)))
    return Database(facts=frozenset(f for block in blocks.values() for f in block))


def random_graph_database(
    rng: random.Random,
    q: GraphQuery,
    max_adom: int = 4,
    max_block: int = 2,
    max_repairs: int = 64,
) -> Database:
    """A random instance over the schema of a conjunctive query, any key arity.

    Half of the instances contain a homomorphic image of q.
    """
    pool = [f"d{i}" for i in range(rng.randint(1, max_adom))]
    values = pool + list(q.constants())
    facts = set()

    if rng.random() < 0.5:
        image = {name: rng.choice(pool) for name in q.variables()}
        for a in q.atoms:
            args = [image[t.name] if t.is_variable else t.name for t in a.args]
            facts.add(Fact(relation=a.relation, key=tuple(args[:a.key_arity]), values=tuple(args[a.key_arity:])))

    for relation, (arity, key_arity) in sorted(q.schema.items()):
        for _ in range(rng.randint(1, max_adom)):
            key = tuple(rng.choice(pool) for _ in range(key_arity))
            for _ in range(rng.randint(1, max_block)):
                facts.add(Fact(relation=relation, key=key,
                               values=tuple(rng.choice(values) for _ in range(arity - key_arity))))
    return _fit_repairs(rng, facts, max_block, max_repairs)


def monotone_cnfs(max_variables: int = 3, max_clauses: int = 3) -> List[MonotoneCNF]:
    """Every monotone CNF over x1..xk (k ≤ max_variables) with 1..max_clauses distinct clauses."""
    variables = [f"x{i + 1}" for i in range(max_variables)]
    options = [
        Clause(positive=positive, literals=subset)
        for size in range(1, max_variables + 1)
        for subset in itertools.combinations(variables, size)
        for positive in (True, False)
    ]
    seen: Dict[str, MonotoneCNF] = {}
    for m in range(1, max_clauses + 1):
        for clauses in itertools.combinations(options, m):
            phi = MonotoneCNF.of(clauses)
            seen.setdefault(phi.render(), phi)
    return list(seen.values())


def small_dags(max_vertices: int = 4) -> List[Digraph]:
    """DAGs on v0..v(k-1) with edges from lower to higher index, for every source/target choice."""
    graphs: List[Digraph] = []
    for k in range(1, max_vertices + 1):
        names = [f"v{i}" for i in range(k)]
        candidates = list(itertools.combinations(names, 2))
        for mask in range(2 ** len(candidates)):
            edges = [e for i, e in enumerate(candidates) if mask >> i & 1]
            for s, t in itertools.product(names, repeat=2):
                graphs.append(Digraph.of(edges, source=s, target=t, vertices=names))
    return graphs


def _subsample(items: List, scale: float) -> List:
    if scale >= 1:
        return items
    step = max(1, round(1 / scale))
    return items[::step]


class CheckResult(BaseModel):
    """Outcome of one selftest property."""

    model_config = ConfigDict(frozen=True)

    name: str
    cases: int
    disagreements: int
    elapsed_seconds: float = 0.0
    failures: Tuple[str, ...] = Field(default=(), description="First few failing cases")

    @property
    def passed(self) -> bool:
        return self.disagreements == 0


class SelfTestReport(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int
    scale: float
    checks: Tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def table(self) -> str:
        width = max((len(c.name) for c in self.checks), default=5)
        lines = [f"{'check':<{width}}  {'cases':>7}  {'disagree':>8}  {'seconds':>8}"]
        for c in self.checks:
            lines.append(f"{c.name:<{width}}  {c.cases:>7}  {c.disagreements:>8}  {c.elapsed_seconds:>8.2f}")
        lines.append("PASS" if self.passed else "FAIL")
        return "\n".join(lines)


Case = Tuple[TreeQuery, Database]


class SelfTestSuite:
    """Differential and property checks between engine, oracle and gadgets.

    ``scale`` multiplies the configured case counts; sweeps over finite
    families (CNFs, DAGs) are subsampled when it is below one.
    """

    MAX_FAILURES = 5

    def __init__(
        self,
        seed: Optional[int] = None,
        scale: float = 1.0,
        progress: bool = True,
        settings: Optional[FuzzConfig] = None,
    ):
        self.settings = settings or config.fuzz
        self.seed = self.settings.seed if seed is None else seed
        self.scale = scale
        self.progress = progress
        self._corpus: Optional[List[Case]] = None

    def rng(self, name: str) -> random.Random:
        return random.Random(f"{self.seed}:{name}")

    def count(self, configured: int) -> int:
        return max(1, int(configured * self.scale))

    @property
    def checks(self) -> Dict[str, Callable[[], CheckResult]]:
        return {
            'golden_classes': self.check_golden_classes,
            'sample_instance': self.check_sample_instance,
            'cfg_example': self.check_cfg_example,
            'graphbcq_examples': self.check_graphbcq_examples,
            'rewinding_closure': self.check_rewinding_closure,
            'preorder_total': self.check_preorder_total,
            'engine_oracle': self.check_engine_oracle,
            'fixpoint_pairs': self.check_fixpoint_pairs,
            'frugal_universality': self.check_frugal_universality,
            'forward_fixpoint': self.check_forward_fixpoint,
            'sat_gadget': self.check_sat_gadget,
            'reach_gadget': self.check_reach_gadget,
            'chain_property': self.check_chain_property,
            'cfg_factor': self.check_cfg_factor,
            'hom_agreement': self.check_hom_agreement,
            'graph_view': self.check_graph_view,
            'core_stability': self.check_core_stability,
            'sjf_lift': self.check_sjf_lift,
        }

    def run(self, names: Optional[Iterable[str]] = None) -> SelfTestReport:
        selected = list(names) if names is not None else list(self.checks)
        unknown = sorted(set(selected) - set(self.checks))
        if unknown:
            raise CQAError(f"unknown selftest checks {unknown}", error_code="selftest")
        results = [self.checks[name]() for name in selected]
        report = SelfTestReport(seed=self.seed, scale=self.scale, checks=tuple(results))
        logger.info("Selftest finished", passed=report.passed, checks=len(results), seed=self.seed)
        return report

    def _evaluate(self, name: str, items: Iterable, judge: Callable[..., Optional[str]], total: Optional[int] = None) -> CheckResult:
        """Run ``judge`` per item; it returns None on agreement or a description."""
        failures: List[str] = []
        cases = disagreements = 0
        with Timer(f"selftest {name}") as timer:
            for item in tqdm(items, desc=name, total=total, disable=not self.progress, leave=False):
                cases += 1
                try:
                    problem = judge(item)
                except CQAError as e:
                    problem = f"{type(e).__name__}: {e}"
                if problem is not None:
                    disagreements += 1
                    if len(failures) < self.MAX_FAILURES:
                        failures.append(problem)
        if disagreements:
            logger.warning("Selftest check disagrees", check=name, disagreements=disagreements, first=failures[0])
        return CheckResult(
            name=name, cases=cases, disagreements=disagreements,
            elapsed_seconds=round(timer.elapsed, 3), failures=tuple(failures),
        )

    # Corpora

    def corpus(self) -> List[Case]:
        """Random C2 queries with random instances, shared by the differential checks."""
        if self._corpus is None:
            rng = self.rng('corpus')
            s = self.settings
            self._corpus = []
            for _ in range(self.count(s.cases)):
                q = random_query_where(rng, satisfies_c2, s.max_vertices)
                self._corpus.append((q, random_database(rng, q, s.max_adom, s.max_block, s.max_repairs)))
        return self._corpus

    def random_trees(self, name: str) -> List[TreeQuery]:
        rng = self.rng(name)
        return [random_tree_query(rng, self.settings.max_vertices) for _ in range(self.count(self.settings.tree_cases))]

    # Checks

    def check_golden_classes(self) -> CheckResult:
        def judge(item) -> Optional[str]:
            text, expected = item
            found = classify_tree(TreeQuery.parse(text)).complexity
            return None if found is expected else f"{text}: {found.value}, expected {expected.value}"
        return self._evaluate('golden_classes', GOLDEN_TREES, judge)

    def check_sample_instance(self) -> CheckResult:
        q, db = fig5_instance()
        marked = satisfiable_sample_repair()

        def judge(step: str) -> Optional[str]:
            if step == 'repairs':
                return None if db.repair_count == 16 and len(enumerate_repairs(db)) == 16 else "expected 16 repairs"
            if step == 'oracle':
                return None if not brute_certain(q, db) else "oracle says certain"
            if step == 'marked':
                listed = any(r == marked for r in enumerate_repairs(db))
                return None if listed and eval_cq(q, marked) is None else "marked repair missing or satisfying"
            return None
        return self._evaluate('sample_instance', ('repairs', 'oracle', 'marked'), judge)

    def check_cfg_example(self) -> CheckResult:
        g = build_cfg(TreeQuery.parse(GRAMMAR_EXAMPLE_QUERY))
        expected = {GRAMMAR_EXAMPLE_ACCEPTED: True, GRAMMAR_EXAMPLE_REJECTED: False}

        def judge(tree: str) -> Optional[str]:
            found = derives(g, g.start, tree)
            return None if found == expected[tree] else f"derives({tree}) = {found}"
        return self._evaluate('cfg_example', list(expected), judge)

    def check_graphbcq_examples(self) -> CheckResult:
        def judge(item) -> Optional[str]:
            text, expected = item
            found = classify_graph(GraphQuery.parse(text)).complexity
            return None if found is expected else f"{text}: {found.value}, expected {expected.value}"
        return self._evaluate('graphbcq_examples', GOLDEN_GRAPHS, judge)

    def check_rewinding_closure(self) -> CheckResult:
        """For incomparable same-label x, y: q ⪯ q[y←x] iff q|y maps into q|x with y sent to x."""
        def judge(q: TreeQuery) -> Optional[str]:
            matcher = TreeMatcher(q, q)
            for x, y in same_label_pairs(q):
                if not q.incomparable(x, y):
                    continue
                for a, b in ((x, y), (y, x)):
                    if maps_into_rewind(q, b, a, False) != matcher.feasible(b, a):
                        return f"{q.describe()}: rewind {b.name}<-{a.name}"
            return None
        trees = self.random_trees('rewinding_closure')
        return self._evaluate('rewinding_closure', trees, judge)

    def check_preorder_total(self) -> CheckResult:
        """Under C_branch the preorder is total and transitive on each label."""
        def judge(q: TreeQuery) -> Optional[str]:
            if not satisfies_c_branch(q):
                return None
            for vs in label_groups(q).values():
                le = {(a.index, b.index): preorder_le(q, a, b) for a in vs for b in vs}
                for a, b in itertools.combinations(vs, 2):
                    if not (le[a.index, b.index] or le[b.index, a.index]):
                        return f"{q.describe()}: {a.name} and {b.name} incomparable"
                for a, b, c in itertools.permutations(vs, 3):
                    if le[a.index, b.index] and le[b.index, c.index] and not le[a.index, c.index]:
                        return f"{q.describe()}: {a.name} ⪯ {b.name} ⪯ {c.name} not transitive"
            return None
        return self._evaluate('preorder_total', self.random_trees('preorder_total'), judge)

    def check_engine_oracle(self) -> CheckResult:
        def judge(case: Case) -> Optional[str]:
            q, db = case
            fixpoint = bool(start_set(q, db))
            oracle = brute_certain(q, db, cap=self.settings.max_repairs)
            return None if fixpoint == oracle else f"{q.to_string()} on {db.summary()}: fixpoint {fixpoint}, oracle {oracle}"
        corpus = self.corpus()
        return self._evaluate('engine_oracle', corpus, judge, total=len(corpus))

    def check_fixpoint_pairs(self) -> CheckResult:
        """Each internal ⟨c, y⟩ is in B iff every repair accepts a tree set from c at S_y."""
        def judge(case: Case) -> Optional[str]:
            q, db = case
            memo = compute_B(q, db)
            g = build_cfg(q)
            internal = q.internal_vertices()
            common = {v.index: set(db.adom) for v in internal}
            for repair in enumerate_repairs(db, cap=self.settings.max_repairs):
                for v in internal:
                    common[v.index] &= accepted_constants(g, v, repair)
            for v in internal:
                if memo.constants_at(v) != common[v.index]:
                    return f"{q.to_string()} at {v.name}: B {sorted(memo.constants_at(v))}, repairs {sorted(common[v.index])}"
            return None
        corpus = self.corpus()
        sample = corpus[::10] or corpus
        return self._evaluate('fixpoint_pairs', sample, judge, total=len(sample))

    def check_frugal_universality(self) -> CheckResult:
        def judge(case: Case) -> Optional[str]:
            q, db = case
            repair = frugal_repair(q, db)
            on_frugal = QueryEvaluator(q.to_graph()).evaluate(repair.facts) is not None
            oracle = brute_certain(q, db, cap=self.settings.max_repairs)
            return None if on_frugal == oracle else f"{q.to_string()}: frugal {on_frugal}, oracle {oracle}"
        corpus = self.corpus()
        return self._evaluate('frugal_universality', corpus, judge, total=len(corpus))

    def check_forward_fixpoint(self) -> CheckResult:
        rng = self.rng('forward_fixpoint')
        s = self.settings
        cases = []
        for _ in range(self.count(s.cases) // 5 or 1):
            q = random_query_where(rng, satisfies_c1, s.max_vertices)
            cases.append((q, random_database(rng, q, s.max_adom, s.max_block, s.max_repairs)))

        def judge(case: Case) -> Optional[str]:
            q, db = case
            forward = compute_B_forward(q, db).constants_at(q.root)
            full = compute_B(q, db).constants_at(q.root)
            return None if bool(forward) == bool(full) else f"{q.to_string()}: forward {sorted(forward)}, fixpoint {sorted(full)}"
        return self._evaluate('forward_fixpoint', cases, judge, total=len(cases))

    def check_sat_gadget(self) -> CheckResult:
        q, _ = fig5_instance()
        formulas = _subsample(monotone_cnfs(self.settings.max_cnf_variables, self.settings.max_cnf_clauses), self.scale)

        def judge(phi: MonotoneCNF) -> Optional[str]:
            certain = brute_certain(q, sat_gadget(q, phi))
            return None if certain != phi.satisfiable() else f"{phi.render()}: certain {certain}"
        return self._evaluate('sat_gadget', formulas, judge, total=len(formulas))

    def check_reach_gadget(self) -> CheckResult:
        q = TreeQuery.parse("R(R(X(_)))")
        graphs = _subsample(small_dags(self.settings.max_dag_vertices), self.scale)

        def judge(g: Digraph) -> Optional[str]:
            certain = brute_certain(q, reach_gadget(q, g))
            return None if certain != g.reachable() else f"{list(g.edges)} {g.source}->{g.target}: certain {certain}"
        return self._evaluate('reach_gadget', graphs, judge, total=len(graphs))

    def check_chain_property(self) -> CheckResult:
        """Under C_branch, fact(f, x) and ⟨c, x⟩ ∈ B carry over to every y with x ⪯ y."""
        def judge(case: Case) -> Optional[str]:
            q, db = case
            memo = compute_B(q, db)
            for vs in label_groups(q).values():
                for x, y in itertools.permutations(vs, 2):
                    if not preorder_le(q, x, y):
                        continue
                    for f in db.facts:
                        if f.relation != x.label.name or len(f.key) != 1:
                            continue
                        if fact_holds(q, db, memo, f, x) and not fact_holds(q, db, memo, f, y):
                            return f"{q.to_string()}: {f.render()} holds at {x.name}, not at {y.name}"
                    missing = memo.constants_at(x) - memo.constants_at(y)
                    if missing:
                        return f"{q.to_string()}: {sorted(missing)} in B at {x.name}, not at {y.name}"
            return None
        corpus = self.corpus()
        sample = corpus[::10] or corpus
        return self._evaluate('chain_property', sample, judge, total=len(sample))

    def check_cfg_factor(self) -> CheckResult:
        """C_factor holds iff q maps into every tree its grammar derives."""
        def judge(q: TreeQuery) -> Optional[str]:
            report = classify_tree(q, verify=False).conditions
            g = build_cfg(q)
            if report.c_factor:
                for s in enumerate_derivations(g, g.start, DERIVATION_BUDGET):
                    if tree_hom(q, TreeQuery.from_sketch(s)) is None:
                        return f"{q.to_string()}: no homomorphism into derived {render_sketch(s)}"
                return None
            for w in report.witnesses:
                if w.condition != 'c_factor':
                    continue
                rewound = rewind(q, w.y, w.x)
                if not derives(g, g.start, rewound):
                    return f"{q.to_string()}: {rewound.to_string()} is not derived"
            return None
        return self._evaluate('cfg_factor', self.random_trees('cfg_factor'), judge)

    def tree_pairs(self, name: str) -> List[Tuple[TreeQuery, TreeQuery]]:
        """Each random tree with one of its own subtrees and with its successor."""
        trees = self.random_trees(name)
        pairs: List[Tuple[TreeQuery, TreeQuery]] = []
        for t, other in zip(trees, trees[1:] + trees[:1]):
            inner = [v for v in t.internal_vertices() if v.parent is not None]
            pairs.append((t.subtree(inner[-1]) if inner else t, t))
            pairs.append((t, other))
        return pairs

    def check_hom_agreement(self) -> CheckResult:
        """Tree homomorphisms agree with homomorphisms of the atom sets; pinned ones are homomorphisms."""
        def judge(pair: Tuple[TreeQuery, TreeQuery]) -> Optional[str]:
            p, q = pair
            tree = tree_hom(p, q) is not None
            pg, qg = tree_to_graph(p), tree_to_graph(q)
            witness = cq_hom(pg, qg)
            if tree != (witness is not None):
                return f"{p.to_string()} -> {q.to_string()}: tree {tree}, cq {witness is not None}"
            if witness is not None and not all(witness.apply_atom(a) in qg.atoms for a in pg.atoms):
                return f"{p.to_string()} -> {q.to_string()}: cq witness leaves the target"
            if not tree:
                for u in p.vertices:
                    for v in q.vertices:
                        if tree_hom(p, q, root_pin=(u.index, v.index)) is not None:
                            return f"{p.to_string()} -> {q.to_string()}: pinned {u.index}->{v.index} without a homomorphism"
            return None
        pairs = self.tree_pairs('hom_agreement')
        return self._evaluate('hom_agreement', pairs, judge, total=len(pairs))

    def check_graph_view(self) -> CheckResult:
        """Trees survive their string form and their atom set, and classify alike as graphs."""
        def judge(t: TreeQuery) -> Optional[str]:
            if TreeQuery.parse(serialize_tree_query(t)) != t:
                return f"{t.describe()}: string round trip changes the tree"
            g = tree_to_graph(t)
            if g.graphbcq_violations():
                return f"{t.to_string()}: {g.graphbcq_violations()[0]}"
            back = is_tree_query(g)
            if back is None or back.to_string() != t.to_string():
                return f"{t.to_string()}: atom set reads back as {back.to_string() if back else None}"
            as_tree = classify_tree(t, verify=False).complexity
            as_graph = classify_graph(g, verify=False).complexity
            if as_tree is not as_graph:
                return f"{t.to_string()}: tree {as_tree.value}, graph {as_graph.value}"
            return None
        return self._evaluate('graph_view', self.random_trees('graph_view'), judge)

    def check_core_stability(self) -> CheckResult:
        """core is equivalent, idempotent and blind to atom order."""
        def judge(q: GraphQuery) -> Optional[str]:
            minimal = core(q)
            if not cq_equivalent(q, minimal):
                return f"{q.render()}: core {minimal.render()} is not equivalent"
            if core(minimal).atoms != minimal.atoms:
                return f"{q.render()}: core of core {core(minimal).render()} differs"
            reordered = core(GraphQuery.of(reversed(q.atoms)))
            if set(reordered.atoms) != set(minimal.atoms):
                return f"{q.render()}: reversed input gives core {reordered.render()}"
            return None
        queries = [GraphQuery.parse(text) for text, _ in GOLDEN_GRAPHS]
        queries += [tree_to_graph(t) for t in self.random_trees('core_stability')]
        return self._evaluate('core_stability', queries, judge, total=len(queries))

    def check_sjf_lift(self) -> CheckResult:
        """Lifting an instance of sjf(q) to q keeps the certain answer."""
        rng = self.rng('sjf_lift')
        s = self.settings
        cases: List[Tuple[GraphQuery, Database]] = []
        for text in LIFT_QUERIES:
            q = GraphQuery.parse(text)
            sjf, _ = q.self_join_free()
            for _ in range(self.count(s.cases) // 10 or 1):
                cases.append((q, random_graph_database(rng, sjf, s.max_adom, s.max_block, s.max_repairs)))

        def judge(case: Tuple[GraphQuery, Database]) -> Optional[str]:
            q, sjf_db = case
            sjf, _ = q.self_join_free()
            before = brute_certain(sjf, sjf_db, cap=s.max_repairs)
            after = brute_certain(q, sjf_lift(q, sjf_db), cap=s.max_repairs)
            return None if before == after else f"{q.render()} on {sjf_db.summary()}: sjf {before}, lifted {after}"
        return self._evaluate('sjf_lift', cases, judge, total=len(cases))


__all__ = [
    'random_tree_query',
    'random_query_where',
    'random_database',
    'random_graph_database',
    'label_groups',
    'satisfies_c1',
    'satisfies_c2',
    'satisfies_c_branch',
    'monotone_cnfs',
    'small_dags',
    'CheckResult',
    'SelfTestReport',
    'SelfTestSuite',
    'GOLDEN_TREES',
    'GOLDEN_GRAPHS',
    'LIFT_QUERIES',
    'GRAMMAR_EXAMPLE_QUERY',
    'GRAMMAR_EXAMPLE_ACCEPTED',
    'GRAMMAR_EXAMPLE_REJECTED',
]
