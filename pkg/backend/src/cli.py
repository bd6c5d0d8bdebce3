#!/usr/bin/env python3
"""
gpar command line.

    gpar match    --graph g.g --pattern p.pat
    gpar metrics  --graphs g.bag --rules r.rules --mode micro
    gpar closure  --graph chain.g --rules trans.rules --max-steps 100

Every subcommand writes deterministic text to stdout (or ``--out``). Errors
print one ``ERR:<code>:<reason>`` line on stderr and exit non-zero:
1 for usage, 2 for data or contract problems, 3 when the oracle cap refuses.
"""

from __future__ import annotations

import argparse
import logging
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Sequence

from src.config.settings import (
    DEFAULT_JOBS,
    DEFAULT_NAMESPACE,
    LOG_FORMAT,
    LOG_LEVEL,
    MAX_CLOSURE_STEPS,
    ORACLE_CAP,
    SWRL_PREFIX,
)
from src.data_pipeline.exporters import to_sparql_construct, to_swrl, validate_sparql
from src.data_pipeline.parsers import (
    FILE_ENCODING,
    FILE_ERRORS,
    format_mapping,
    format_term,
    load_graph,
    load_graph_bag,
    load_pattern,
    load_pattern_bag,
    load_rules,
    load_transactions,
    serialize_graph,
    serialize_pattern,
    serialize_rule,
    serialize_transactions,
    tokenize,
)
from src.engine import isar
from src.engine.generative import LinkQuery, closure_all, extend_all, link_predict, predict_patterns
from src.engine.gpar_metrics import metrics_macro, metrics_micro, metrics_single, rank_rules
from src.engine.matcher import evaluate, has_match
from src.engine.reframe import check_correspondence, generate_transaction_db
from src.engine.rewriting import as_simplified, from_simplified, is_trivial
from src.models.errors import GparError, QueryError
from src.models.graph import GraphBag
from src.models.mapping import Semantics
from src.models.metrics import METRIC_COLUMNS, REPORT_HEADER, MetricReport, Regime
from src.models.rule import RuleEntry
from src.models.terms import Term
from src.models.transactions import ISARule

logger = logging.getLogger("gpar")


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        raise UsageError(message)


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------

def _graph_bag(args) -> GraphBag:
    if getattr(args, "graphs", None):
        return load_graph_bag(args.graphs)
    return GraphBag((("graph", load_graph(args.graph)),))


def _rules(args) -> list[RuleEntry]:
    return load_rules(args.rules)


def _map(args, fn: Callable, items: Sequence) -> list:
    """Order-preserving map, threaded when ``--jobs`` asks for it."""
    if args.jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(item) for item in items]


def _tsv(fields: Sequence[object]) -> str:
    return "\t".join(str(f) for f in fields)


def _parse_query(text: str) -> LinkQuery:
    tokens = tokenize(text)
    if len(tokens) != 3:
        raise QueryError(f"a query has 3 positions, got {len(tokens)}")
    positions = [None if (t.text == "?" and not t.quoted) else Term(t.text) for t in tokens]
    return LinkQuery(*positions)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_match(args) -> list[str]:
    semantics = Semantics(args.semantics)
    bag = _graph_bag(args)
    if args.patterns:
        patterns = load_pattern_bag(args.patterns)
        lines = [_tsv(["pattern", *bag.ids])]
        for pattern_id, pattern in patterns:
            row = _map(args, lambda item: int(has_match(pattern, item[1], semantics)), list(bag))
            lines.append(_tsv([pattern_id, *row]))
        return lines

    pattern = load_pattern(args.pattern)
    lines = []
    for graph_id, g in bag:
        for mu in evaluate(pattern, g, semantics):
            text = format_mapping(mu) or "{}"
            lines.append(_tsv([graph_id, text]) if args.graphs else text)
    return lines


def _report_rows(report: MetricReport, args, rule_id: str | None = None) -> list[str]:
    row = report.to_row(args.decimal)
    if rule_id is not None:
        row[0] = rule_id
    return [_tsv(row)]


def cmd_metrics(args) -> list[str]:
    if args.semantics != Semantics.NRA.value:
        raise UsageError("metrics are defined for nra semantics only")
    bag = _graph_bag(args)
    rules = _rules(args)
    mode = Regime(args.mode or ("micro" if args.graphs else "single"))

    def one(entry: RuleEntry) -> list[str]:
        if mode is Regime.MICRO:
            return _report_rows(metrics_micro(bag, entry, args.jobs), args)
        if mode is Regime.MACRO:
            return _report_rows(metrics_macro(bag, entry, args.jobs, args.condition), args)
        rows = []
        for graph_id, g in bag:
            report = metrics_single(g, entry)
            rows += _report_rows(report, args, f"{report.rule_name}@{graph_id}" if args.graphs else None)
        return rows

    lines = []
    if args.header:
        header = list(REPORT_HEADER) + (["applicability"] if mode is Regime.MACRO else [])
        if args.decimal is not None:
            header += [f"~{name}" for name in METRIC_COLUMNS]
        lines.append(_tsv(header))
    for rows in _map(args, one, rules):
        lines += rows
    return lines


def cmd_apply(args) -> list[str]:
    g = load_graph(args.graph)
    return serialize_graph(extend_all(g, _rules(args))).splitlines()


def cmd_closure(args) -> list[str]:
    result = closure_all(load_graph(args.graph), _rules(args), args.max_steps)
    status = "FIXPOINT" if result.fixpoint else "PARTIAL"
    return serialize_graph(result.graph).splitlines() + [f"{status} steps={result.steps_used}"]


def cmd_trivial(args) -> list[str]:
    lines = []
    for entry in _rules(args):
        trivial, witness = is_trivial(entry)
        lines.append(_tsv([entry.name, "TRIVIAL", witness]) if trivial else _tsv([entry.name, "NONTRIVIAL"]))
    return lines


def cmd_rewrite(args) -> list[str]:
    lines = []
    for entry in _rules(args):
        rewritten = as_simplified(entry) if args.to == "simplified" else from_simplified(as_simplified(entry))
        lines += serialize_rule(rewritten).splitlines()
    return lines


def cmd_predict(args) -> list[str]:
    g = load_graph(args.graph)
    rules = _rules(args)
    if args.query:
        predictions = link_predict(g, rules, _parse_query(args.query))
        return [_tsv([format_term(p.term), p.rule_name, p.confidence]) for p in predictions]
    lines = []
    for entry in rules:
        for k, pattern in enumerate(predict_patterns(g, entry), start=1):
            lines.append(f"@prediction {entry.name} {k}")
            lines += serialize_pattern(pattern).splitlines()
    return lines


def cmd_oracle(args) -> list[str]:
    bag = _graph_bag(args)
    rules = _rules(args)
    reports = _map(args, lambda entry: check_correspondence(bag, entry, args.cap, args.regime), rules)
    if args.dump_db:
        with open(args.dump_db, "w", encoding=FILE_ENCODING, errors=FILE_ERRORS) as f:
            for entry in rules:
                f.write(f"# rule {entry.name}\n")
                f.write(serialize_transactions(generate_transaction_db(bag, entry, args.cap)))
    lines = []
    for report in reports:
        lines.append(_tsv(["DB_SIZE", report.rule_name, report.db_size]))
        lines += [_tsv(row) for row in report.to_rows()]
    return lines


def cmd_export_sparql(args) -> list[str]:
    lines = []
    for entry in _rules(args):
        query = to_sparql_construct(entry, args.namespace, args.filter_terms)
        if args.validate:
            validate_sparql(query)
        lines.append(f"# rule {entry.name}")
        lines += query.splitlines()
    return lines


def cmd_export_swrl(args) -> list[str]:
    lines = []
    for entry in _rules(args):
        lines.append(f"# rule {entry.name}")
        lines += to_swrl(entry, args.namespace, args.filter_terms, args.prefix).splitlines()
    return lines


def cmd_rank(args) -> list[str]:
    ranked = rank_rules(load_graph_bag(args.graphs), _rules(args), args.jobs)
    return [_tsv([i, r.rule_name, r.applicability, r.lift]) for i, r in enumerate(ranked, start=1)]


def cmd_isar(args) -> list[str]:
    db = load_transactions(args.transactions)
    rule = ISARule(frozenset(args.antecedent), frozenset(args.consequent))
    values = isar.isar_metrics(db, rule)
    flags = []
    if isar.is_trivial_isar(rule):
        flags.append("trivial")
    elif rule.partially_redundant:
        flags.append("partially-redundant")
    row = [rule, len(db), *(values[name] for name in METRIC_COLUMNS), ",".join(flags) or "-"]
    if args.decimal is not None:
        row += ["~" + values[name].decimal(args.decimal) for name in METRIC_COLUMNS]
    return [_tsv(row)]


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_graph_inputs(parser: argparse.ArgumentParser, required: bool = True) -> None:
    group = parser.add_mutually_exclusive_group(required=required)
    group.add_argument("--graph", help="graph file")
    group.add_argument("--graphs", help="graph-bag file with @graph headers")


def _add_export_options(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rules", required=True)
    parser.add_argument("--namespace", default=DEFAULT_NAMESPACE)
    parser.add_argument("--filter-terms", choices=["antecedent", "rule"], default="antecedent",
                        help="terms that antecedent variables must differ from")


def build_parser() -> argparse.ArgumentParser:
    common = _ArgumentParser(add_help=False)
    common.add_argument("--out", help="write output to this file instead of stdout")
    common.add_argument("--jobs", type=int, default=DEFAULT_JOBS)
    common.add_argument("-v", "--verbose", action="count", default=0)

    parser = _ArgumentParser(prog="gpar", description="Graph pattern-based association rules.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler, help_text: str) -> argparse.ArgumentParser:
        p = sub.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    p = add("match", cmd_match, "enumerate pattern matches")
    _add_graph_inputs(p)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--pattern")
    group.add_argument("--patterns", help="pattern-bag file; prints a match matrix")
    p.add_argument("--semantics", choices=[s.value for s in Semantics], default=Semantics.NRA.value)

    p = add("metrics", cmd_metrics, "rule metrics")
    _add_graph_inputs(p)
    p.add_argument("--rules", required=True)
    p.add_argument("--mode", choices=[r.value for r in Regime])
    p.add_argument("--semantics", choices=[s.value for s in Semantics], default=Semantics.NRA.value)
    p.add_argument("--condition", default="lift",
                   choices=["support", "confidence", "lift", "leverage", "conviction"],
                   help="definedness condition behind macro applicability")
    p.add_argument("--decimal", type=int, metavar="DIGITS")
    p.add_argument("--header", action="store_true")

    p = add("apply", cmd_apply, "one extension step")
    p.add_argument("--graph", required=True)
    p.add_argument("--rules", required=True)

    p = add("closure", cmd_closure, "extend to a fixpoint")
    p.add_argument("--graph", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--max-steps", type=int, default=MAX_CLOSURE_STEPS)

    p = add("trivial", cmd_trivial, "triviality check")
    p.add_argument("--rules", required=True)

    p = add("rewrite", cmd_rewrite, "rewrite rules")
    p.add_argument("--rules", required=True)
    p.add_argument("--to", choices=["simplified", "full"], default="simplified")

    p = add("predict", cmd_predict, "predicted patterns or link prediction")
    p.add_argument("--graph", required=True)
    p.add_argument("--rules", required=True)
    p.add_argument("--query", help='triple with one "?" hole, e.g. "t3 t8 ?"')

    p = add("oracle", cmd_oracle, "itemset reframing cross-check")
    _add_graph_inputs(p)
    p.add_argument("--rules", required=True)
    p.add_argument("--cap", type=int, default=ORACLE_CAP)
    p.add_argument("--regime", choices=["micro", "macro"], default="micro")
    p.add_argument("--dump-db", help="also write the generated transactions here")

    p = add("export-sparql", cmd_export_sparql, "SPARQL CONSTRUCT export")
    _add_export_options(p)
    p.add_argument("--validate", action="store_true", help="re-parse the query before writing it")

    p = add("export-swrl", cmd_export_swrl, "SWRL export")
    _add_export_options(p)
    p.add_argument("--prefix", default=SWRL_PREFIX)

    p = add("rank", cmd_rank, "rank rules by applicability, then macro-lift")
    p.add_argument("--graphs", required=True)
    p.add_argument("--rules", required=True)

    p = add("isar", cmd_isar, "itemset rule metrics on a transaction file")
    p.add_argument("--transactions", required=True)
    p.add_argument("--antecedent", nargs="+", required=True)
    p.add_argument("--consequent", nargs="+", required=True)
    p.add_argument("--decimal", type=int, metavar="DIGITS")

    return parser


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def _configure_logging(verbosity: int) -> None:
    level = {0: LOG_LEVEL.upper(), 1: "INFO"}.get(verbosity, "DEBUG")
    logging.basicConfig(level=level, format=LOG_FORMAT, stream=sys.stderr, force=True)


def _emit(lines: list[str], out: str | None) -> None:
    data = "".join(line + "\n" for line in lines).encode(FILE_ENCODING, FILE_ERRORS)
    if out:
        with open(out, "wb") as f:
            f.write(data)
        return
    stream = getattr(sys.stdout, "buffer", None)
    if stream is None:
        sys.stdout.write(data.decode(FILE_ENCODING, "replace"))
        return
    sys.stdout.flush()
    stream.write(data)
    stream.flush()


def _report_error(code: str, exc: Exception) -> None:
    # surrogate-escaped bytes in labels print as \udcXX
    text = f"ERR:{code}:{exc}".encode(FILE_ENCODING, "backslashreplace").decode(FILE_ENCODING)
    print(text, file=sys.stderr)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        _report_error("usage", exc)
        return 1
    except SystemExit as exc:  # --help
        return int(exc.code or 0)

    _configure_logging(args.verbose)
    try:
        if args.jobs < 1:
            raise UsageError("--jobs must be at least 1")
        lines = args.handler(args)
        _emit(lines, args.out)
    except UsageError as exc:
        _report_error("usage", exc)
        return 1
    except GparError as exc:
        _report_error(exc.code, exc)
        return exc.exit_code
    except OSError as exc:
        _report_error("io", exc)
        return 2
    logger.info("%s done", args.command)
    return 0


if __name__ == "__main__":
    sys.exit(main())
