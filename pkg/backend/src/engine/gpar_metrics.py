"""Probabilistic metrics of graph pattern-based association rules.

The sample space of a rule on a graph is the set of non-repetitive n-tuples
over the graph's terms minus both patterns' terms. It is never materialized:
its size is a falling factorial, and the two events are read off projected
nra matches of the antecedent and the consequent.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Callable, Iterable, Sequence

from src.engine import formulas
from src.engine.matcher import evaluate, project
from src.engine.rewriting import as_rule, ensure_valid
from src.models.errors import ContractViolation
from src.models.graph import Graph, GraphBag, Pattern
from src.models.mapping import Semantics
from src.models.metrics import (
    EMPTY_BAG,
    METRIC_COLUMNS,
    EventStats,
    MetricReport,
    MetricValue,
    Regime,
    Situation,
)
from src.models.rule import Rule, RuleEntry
from src.models.terms import Term

logger = logging.getLogger(__name__)

GraphCondition = Callable[[str, Graph], bool]

MACRO_METRICS = METRIC_COLUMNS + ("antecedent_weighted_conviction",)


# ---------------------------------------------------------------------------
# Event statistics
# ---------------------------------------------------------------------------

def tau_cardinality(g: Graph, p1: Pattern, p2: Pattern, n: int) -> int:
    """|T^n|: the falling factorial m·(m-1)···(m-n+1); 0 when n > m."""
    if n < 1:
        raise ContractViolation("tuple length must be at least 1")
    m = len(g.term_set - p1.terms - p2.terms)
    return math.perm(m, n)


def event_sets(g: Graph, rule: Rule) -> tuple[set[tuple[Term, ...]], set[tuple[Term, ...]]]:
    """The two events as sets of term tuples.

    An nra match of p1 already avoids p1's terms, so E1 only drops tuples
    touching p2's terms (and symmetrically for E2).
    """
    e1 = {
        t for t in project(evaluate(rule.p1, g, Semantics.NRA), rule.v1)
        if rule.p2.terms.isdisjoint(t)
    }
    e2 = {
        t for t in project(evaluate(rule.p2, g, Semantics.NRA), rule.v2)
        if rule.p1.terms.isdisjoint(t)
    }
    return e1, e2


def event_stats_single(g: Graph, rule: RuleEntry, graph_id: str | None = None) -> EventStats:
    rule = ensure_valid(as_rule(rule))
    e1, e2 = event_sets(g, rule)
    stats = EventStats(
        n=rule.n,
        tau_card=tau_cardinality(g, rule.p1, rule.p2, rule.n),
        e1_card=len(e1),
        e2_card=len(e2),
        joint_card=len(e1 & e2),
        graph_id=graph_id,
    )
    logger.debug("rule %s on %s: %s", rule.name, graph_id or "graph", stats.counts())
    return stats


def per_graph_stats(bag: GraphBag, rule: RuleEntry, jobs: int = 1) -> list[EventStats]:
    """Single-graph statistics for every graph, in bag order."""
    rule = ensure_valid(as_rule(rule))

    def one(item: tuple[str, Graph]) -> EventStats:
        graph_id, g = item
        return event_stats_single(g, rule, graph_id)

    if jobs > 1 and len(bag) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, bag))
    return [one(item) for item in bag]


def _pool(stats: Iterable[EventStats], n: int) -> EventStats:
    return reduce(lambda a, b: a + b, stats, EventStats(n, 0, 0, 0, 0))


def event_stats_micro(bag: GraphBag, rule: RuleEntry, jobs: int = 1) -> EventStats:
    """Component-wise sums; tuples from different graphs never coincide."""
    rule = as_rule(rule)
    return _pool(per_graph_stats(bag, rule, jobs), rule.n)


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

def metric_values(stats: EventStats) -> dict[str, MetricValue]:
    total, e1, e2, joint = counts = stats.counts()
    return {
        "support1": formulas.support(e1, total),
        "support2": formulas.support(e2, total),
        "confidence": formulas.confidence(e1, joint),
        "lift": formulas.lift(*counts),
        "leverage": formulas.leverage(*counts),
        "conviction": formulas.conviction(*counts),
        "antecedent_weighted_conviction": formulas.antecedent_weighted_conviction(*counts),
    }


def _report(name: str, regime: Regime, stats: EventStats, values: dict[str, MetricValue],
            per_graph: Sequence[EventStats] = (), applicability: MetricValue | None = None) -> MetricReport:
    return MetricReport(
        rule_name=name,
        regime=regime,
        stats=stats,
        support_p1=values["support1"],
        support_p2=values["support2"],
        confidence=values["confidence"],
        lift=values["lift"],
        leverage=values["leverage"],
        conviction=values["conviction"],
        antecedent_weighted_conviction=values["antecedent_weighted_conviction"],
        per_graph=tuple(per_graph),
        applicability=applicability,
    )


def metrics_single(g: Graph, rule: RuleEntry) -> MetricReport:
    rule = as_rule(rule)
    stats = event_stats_single(g, rule)
    return _report(rule.name, Regime.SINGLE, stats, metric_values(stats))


def metrics_micro(bag: GraphBag, rule: RuleEntry, jobs: int = 1) -> MetricReport:
    rule = as_rule(rule)
    per_graph = per_graph_stats(bag, rule, jobs)
    stats = _pool(per_graph, rule.n)
    return _report(rule.name, Regime.MICRO, stats, metric_values(stats), per_graph)


def average_metric(values: Sequence[tuple[str, MetricValue]]) -> MetricValue:
    """Macro average of per-graph values.

    Undefined (listing the offending graphs) unless every graph's value is
    defined; any infinite value makes the average infinite.
    """
    if not values:
        return MetricValue.undefined(EMPTY_BAG)
    violators = [(gid, v) for gid, v in values if not v.is_defined]
    if violators:
        return MetricValue.undefined(violators[0][1].reason, tuple(gid for gid, _ in violators))
    if any(v.is_infinite for _, v in values):
        return MetricValue.infinity()
    return MetricValue.rational(sum((v.value for _, v in values), Fraction(0)) / len(values))


def metrics_macro(bag: GraphBag, rule: RuleEntry, jobs: int = 1, condition: str = "lift") -> MetricReport:
    rule = as_rule(rule)
    per_graph = per_graph_stats(bag, rule, jobs)
    per_values = [(s.graph_id or "", metric_values(s)) for s in per_graph]
    averaged = {
        name: average_metric([(gid, values[name]) for gid, values in per_values])
        for name in MACRO_METRICS
    }
    undefined = [name for name, v in averaged.items() if not v.is_defined and v.violators]
    if undefined:
        logger.warning("rule %s: macro %s undefined on part of the bag", rule.name, ", ".join(undefined))
    if per_graph:
        satisfied = sum(1 for s in per_graph if formulas.condition_holds(condition, s.counts()))
        applicability = MetricValue.rational(Fraction(satisfied, len(per_graph)))
    else:
        applicability = MetricValue.undefined(EMPTY_BAG)
    return _report(rule.name, Regime.MACRO, _pool(per_graph, rule.n), averaged, per_graph, applicability)


# ---------------------------------------------------------------------------
# Applicability and ranking
# ---------------------------------------------------------------------------

def metric_condition(metric: str, rule: RuleEntry) -> GraphCondition:
    """Per-graph predicate: the metric is defined for ``rule`` on that graph."""
    rule = as_rule(rule)
    formulas.condition_holds(metric, (0, 0, 0, 0))  # fail fast on an unknown name

    def holds(graph_id: str, g: Graph) -> bool:
        return formulas.condition_holds(metric, event_stats_single(g, rule, graph_id).counts())

    return holds


def degree_of_applicability(bag: GraphBag, cond: GraphCondition) -> tuple[MetricValue, GraphBag]:
    """Fraction of the bag satisfying ``cond``, with the reduced bag."""
    if not len(bag):
        return MetricValue.undefined(EMPTY_BAG), bag
    reduced = bag.filter(cond)
    return MetricValue.rational(Fraction(len(reduced), len(bag))), reduced


@dataclass(frozen=True)
class RankedRule:
    rule_name: str
    applicability: MetricValue
    lift: MetricValue

    def sort_key(self) -> tuple:
        app = self.applicability.value if self.applicability.is_rational else Fraction(-1)
        if self.lift.is_rational:
            return (-app, 0, -self.lift.value, self.rule_name)
        return (-app, 1, Fraction(0), self.rule_name)


def rank_rules(bag: GraphBag, rules: Sequence[RuleEntry], jobs: int = 1) -> list[RankedRule]:
    """Two-stage order: applicability of lift first, then macro-lift on the reduced bag."""

    def score(entry: RuleEntry) -> RankedRule:
        rule = as_rule(entry)
        applicability, reduced = degree_of_applicability(bag, metric_condition("lift", rule))
        lift = metrics_macro(reduced, rule).lift
        return RankedRule(rule.name, applicability, lift)

    if jobs > 1 and len(rules) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            ranked = list(pool.map(score, rules))
    else:
        ranked = [score(r) for r in rules]
    return sorted(ranked, key=RankedRule.sort_key)


# ---------------------------------------------------------------------------
# Situations
# ---------------------------------------------------------------------------

# Checked in this order; the first that holds wins. Empty events are DIS.
SITUATION_TESTS: tuple[tuple[Situation, Callable[[int, int, int, int], bool]], ...] = (
    (Situation.DIS, lambda tau, e1, e2, joint: joint == 0),
    (Situation.IDE, lambda tau, e1, e2, joint: e1 == e2 == joint),
    (Situation.IND, lambda tau, e1, e2, joint: joint * tau == e1 * e2),
    (Situation.POS, lambda tau, e1, e2, joint: joint * tau > e1 * e2),
    (Situation.NEG, lambda tau, e1, e2, joint: joint * tau < e1 * e2),
)


def classify_situation(stats: EventStats) -> Situation | None:
    """Situation of the two events; ``None`` when the sample space is empty."""
    if stats.tau_card == 0:
        return None
    counts = stats.counts()
    for situation, test in SITUATION_TESTS:
        if test(*counts):
            return situation
    raise AssertionError("situation tests are exhaustive")


def classify_macro(per_graph: Sequence[EventStats]) -> Situation | None:
    """Common situation of all graphs, or MIXED when they disagree."""
    situations = [classify_situation(s) for s in per_graph]
    if not situations or any(s is None for s in situations):
        return None
    first = situations[0]
    return first if all(s is first for s in situations) else Situation.MIXED
