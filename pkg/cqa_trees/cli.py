"""Command-line interface for consistent query answering over tree queries."""

import argparse
import sys
import traceback
from pathlib import Path
from typing import List, Optional

from . import __version__
from .config import config
from .core.exceptions import (
    CQAError,
    OracleCapExceeded,
    ParseError,
    PreconditionError,
    ValidationError,
)
from .core.logging import LogManager, get_logger, set_run_id
from .core.utils import Timer, read_text_argument, validate_required
from .models import Database, TreeQuery, parse_database, parse_graph_query, parse_tree_query
from .services.classification import classify_graph, classify_tree
from .services.engine import certain, frugal_repair, frugal_sets
from .services.fuzzing import SelfTestSuite
from .services.gadgets import (
    SAMPLE_QUERY,
    Digraph,
    MonotoneCNF,
    reach_gadget,
    sat_gadget,
    fig5_instance,
    sjf_lift,
)
from .services.oracle import brute_certain_report, brute_start_set
from .services.reporting import (
    FORMATS,
    RunReport,
    certain_result,
    frugal_result,
    graph_classification_result,
    instance_result,
    oracle_result,
    tree_classification_result,
)

EXIT_TRUE = 0
EXIT_FALSE = 1
EXIT_ERROR = 2

REACH_QUERY = "R(R(X(_)))"


def setup_argparse() -> argparse.ArgumentParser:
    """Set up argument parser."""
    parser = argparse.ArgumentParser(
        prog='cqa-trees',
        description='Classify and answer rooted tree queries over inconsistent databases',
    )
    parser.add_argument('--version', action='version', version=f'%(prog)s {__version__}')

    # Add global arguments
    parser.add_argument(
        '--log-level',
        choices=['debug', 'info', 'warning', 'error', 'critical'],
        default=None,
        help='Set the logging level (default from config.yml)'
    )
    parser.add_argument(
        '--format',
        choices=FORMATS,
        default=None,
        help='Report format (default from config.yml)'
    )

    subparsers = parser.add_subparsers(dest='command', help='Available commands')

    classify_parser = subparsers.add_parser('classify', help='Classify the complexity of CQA(q)')
    classify_parser.add_argument('query', help='Query text or a file holding it')
    classify_parser.add_argument('--graph', action='store_true', help='Read the query as an atom list')

    certain_parser = subparsers.add_parser('certain', help='Decide whether every repair satisfies q')
    certain_parser.add_argument('query', help='Tree query text or a file holding it')
    certain_parser.add_argument('db', help='Fact file')
    certain_parser.add_argument('--method', choices=['auto', 'fixpoint', 'forward', 'oracle'], default='auto')
    certain_parser.add_argument('--cap', type=int, help='Oracle repair cap')
    certain_parser.add_argument('--force', action='store_true', help='Run a method outside its condition')

    oracle_parser = subparsers.add_parser('oracle', help='Brute force over all repairs')
    oracle_parser.add_argument('query', help='Query text or a file holding it')
    oracle_parser.add_argument('db', help='Fact file')
    oracle_parser.add_argument('--cap', type=int, help='Oracle repair cap')
    oracle_parser.add_argument('--graph', action='store_true', help='Read the query as an atom list')
    oracle_parser.add_argument('--trace', action='store_true', help='Decide CertainTrace instead of CQA')

    frugal_parser = subparsers.add_parser('frugal', help='Print the frugal repair')
    frugal_parser.add_argument('query', help='Tree query text or a file holding it')
    frugal_parser.add_argument('db', help='Fact file')
    frugal_parser.add_argument('--sets', action='store_true', help='Also print every frugal set')

    gadget_parser = subparsers.add_parser('gadget', help='Generate a reduction instance')
    gadget_parser.add_argument('kind', choices=['sat', 'reach', 'fig5', 'sample', 'sjf-lift'])
    gadget_parser.add_argument('--query', help='Witness query (tree syntax; atom list for sjf-lift)')
    gadget_parser.add_argument('--cnf', help='Monotone CNF such as "(x1|x2)&(~x1|~x2)"')
    gadget_parser.add_argument('--edges', help='Edge list such as "s>a,a>t"')
    gadget_parser.add_argument('--source', default='s', help='Source vertex')
    gadget_parser.add_argument('--target', default='t', help='Target vertex')
    gadget_parser.add_argument('--sjf-db', help='Fact file over the self-join-free schema')
    gadget_parser.add_argument('--out', help='Write the fact file here')

    selftest_parser = subparsers.add_parser('selftest', help='Run the property and differential checks')
    selftest_parser.add_argument('--seed', type=int, help='Seed (default from config.yml / CQA_SEED)')
    selftest_parser.add_argument('--scale', type=float, default=1.0, help='Multiplier of case counts')
    selftest_parser.add_argument('--check', action='append', help='Run only this check (repeatable)')
    selftest_parser.add_argument('--no-progress', action='store_true', help='Hide progress bars')

    return parser


def _tree(value: str) -> TreeQuery:
    return parse_tree_query(read_text_argument(value).strip())


def _database(value: str) -> Database:
    return parse_database(read_text_argument(value))


def handle_classify(args) -> RunReport:
    text = read_text_argument(args.query).strip()
    report = RunReport(command='classify').add_input('query', text)
    if args.graph:
        report.result = graph_classification_result(classify_graph(parse_graph_query(text)))
    else:
        report.result = tree_classification_result(classify_tree(parse_tree_query(text)))
    return report


def handle_certain(args) -> RunReport:
    q, db = _tree(args.query), _database(args.db)
    answer = certain(q, db, oracle_cap=args.cap, method=args.method, force=args.force)
    report = RunReport(command='certain', result=certain_result(answer), method=answer.method.value)
    return report.add_input('query', q.to_string()).add_input('db', db.to_text())


def handle_oracle(args) -> RunReport:
    text = read_text_argument(args.query).strip()
    db = _database(args.db)
    report = RunReport(command='oracle', method='oracle').add_input('query', text).add_input('db', db.to_text())
    if args.trace:
        starts = brute_start_set(parse_tree_query(text), db, cap=args.cap)
        report.result = {'certain_trace': bool(starts), 'start_set': sorted(starts)}
    else:
        q = parse_graph_query(text) if args.graph else parse_tree_query(text)
        report.result = oracle_result(brute_certain_report(q, db, cap=args.cap))
    return report


def handle_frugal(args) -> RunReport:
    q, db = _tree(args.query), _database(args.db)
    sets = frugal_sets(q, db) if args.sets else None
    report = RunReport(command='frugal', result=frugal_result(q, frugal_repair(q, db), sets))
    return report.add_input('query', q.to_string()).add_input('db', db.to_text())


def handle_gadget(args) -> RunReport:
    report = RunReport(command=f'gadget {args.kind}')
    if args.kind in ('fig5', 'sample'):
        q, db = fig5_instance()
    elif args.kind == 'sat':
        validate_required(args.cnf, '--cnf')
        q = _tree(args.query or SAMPLE_QUERY)
        phi = MonotoneCNF.parse(args.cnf)
        report.add_input('cnf', phi.render())
        db = sat_gadget(q, phi)
    elif args.kind == 'reach':
        if args.edges is None:
            raise ValidationError("--edges is required")
        q = _tree(args.query or REACH_QUERY)
        g = Digraph.parse(args.edges, source=args.source, target=args.target)
        report.add_input('edges', args.edges)
        db = reach_gadget(q, g)
    else:
        validate_required(args.query, '--query')
        validate_required(args.sjf_db, '--sjf-db')
        q = parse_graph_query(read_text_argument(args.query).strip())
        db = sjf_lift(q, _database(args.sjf_db))
    query_text = q.to_string() if isinstance(q, TreeQuery) else q.render()
    report.add_input('query', query_text)

    if args.out:
        Path(args.out).write_text(db.to_text(), encoding='utf-8')
        report.result = instance_result(db, args.out)
    else:
        report.result = {**instance_result(db), 'facts': [f.render() for f in db.sorted_facts]}
    report.result['query'] = query_text
    return report


def handle_selftest(args) -> RunReport:
    suite = SelfTestSuite(seed=args.seed, scale=args.scale, progress=not args.no_progress)
    outcome = suite.run(args.check)
    result = {'passed': outcome.passed, 'seed': outcome.seed, 'scale': outcome.scale}
    for check in outcome.checks:
        result[check.name] = f"{check.disagreements}/{check.cases}"
    return RunReport(command='selftest', result=result)


HANDLERS = {
    'classify': handle_classify,
    'certain': handle_certain,
    'oracle': handle_oracle,
    'frugal': handle_frugal,
    'gadget': handle_gadget,
    'selftest': handle_selftest,
}

VERDICT_FIELDS = ('certain', 'certain_trace', 'passed')


def exit_code(report: RunReport) -> int:
    """0 for true or success, 1 for a false verdict."""
    for name in VERDICT_FIELDS:
        if name in report.result:
            return EXIT_TRUE if report.result[name] else EXIT_FALSE
    return EXIT_TRUE


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point for CLI."""
    parser = setup_argparse()
    args = parser.parse_args(argv)

    # Configure logging with user-specified level
    LogManager.configure_logging(level=args.log_level or config.logging.level, log_file=config.logging.file)
    logger = get_logger('cqa_trees.cli')
    set_run_id()

    if not args.command:
        parser.print_help()
        return EXIT_ERROR

    fmt = args.format or config.output.default_format
    try:
        with Timer(f"command {args.command}") as timer:
            report = HANDLERS[args.command](args)
        report.elapsed_seconds = round(timer.elapsed, 6)
        print(report.render(fmt))
        return exit_code(report)

    except ParseError as e:
        print(f"Parse error: {e}", file=sys.stderr)
        logger.error("Parse error", error=str(e), error_code=e.error_code)
    except OracleCapExceeded as e:
        print(f"Oracle cap exceeded: {e}", file=sys.stderr)
        logger.error("Oracle cap exceeded", error=str(e), repairs=e.repair_count, cap=e.cap)
    except PreconditionError as e:
        print(f"Precondition failed: {e}", file=sys.stderr)
        logger.error("Precondition failed", error=str(e), error_code=e.error_code)
    except CQAError as e:
        print(f"Error: {e} (code: {e.error_code})", file=sys.stderr)
        logger.error("Toolkit error", error=str(e), error_code=e.error_code)
    except OSError as e:
        print(f"I/O error: {e}", file=sys.stderr)
        logger.error("I/O error", error=str(e))
    except Exception as e:
        print(f"Unexpected error: {e}", file=sys.stderr)
        logger.error("Unexpected error", error=str(e), traceback=traceback.format_exc())
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
