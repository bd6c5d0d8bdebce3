"""Itemset reframing of a graph rule, used as an independent oracle.

Every tuple X of the sample space becomes one transaction holding ``A`` when
X corresponds to an antecedent match and ``B`` when it corresponds to a
consequent match. Membership is decided per tuple with ``m_g``, not from match
projections, so the itemset metrics on the generated database check the
projection-based graph metrics.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import permutations
from typing import Literal

from src.config.settings import ORACLE_CAP
from src.engine import isar
from src.engine.gpar_metrics import average_metric, metrics_macro, metrics_micro, tau_cardinality
from src.engine.matcher import m_g
from src.engine.rewriting import as_rule, ensure_valid
from src.models.errors import CapExceededError
from src.models.graph import Graph, GraphBag
from src.models.mapping import Semantics
from src.models.metrics import METRIC_COLUMNS, MetricValue
from src.models.rule import Rule, RuleEntry
from src.models.transactions import ISARule, Itemset, TransactionDB, itemset

logger = logging.getLogger(__name__)

ANTECEDENT_ITEM = "A"
CONSEQUENT_ITEM = "B"
REFRAMED_RULE = ISARule(itemset([ANTECEDENT_ITEM]), itemset([CONSEQUENT_ITEM]))

_ITEMSETS: dict[tuple[bool, bool], Itemset] = {
    (False, False): itemset([]),
    (True, False): itemset([ANTECEDENT_ITEM]),
    (False, True): itemset([CONSEQUENT_ITEM]),
    (True, True): itemset([ANTECEDENT_ITEM, CONSEQUENT_ITEM]),
}


def _check_cap(bag: GraphBag, rule: Rule, cap: int) -> int:
    required = sum(tau_cardinality(g, rule.p1, rule.p2, rule.n) for _, g in bag)
    if required > cap:
        raise CapExceededError(required, cap)
    return required


def _transactions(g: Graph, rule: Rule) -> list[Itemset]:
    eligible = sorted(g.term_set - rule.p1.terms - rule.p2.terms)
    rows = []
    for x in permutations(eligible, rule.n):
        in_a = m_g(g, x, rule.p1, rule.v1, Semantics.NRA)
        in_b = m_g(g, x, rule.p2, rule.v2, Semantics.NRA)
        rows.append(_ITEMSETS[(in_a, in_b)])
    return rows


def generate_transaction_db(bag: GraphBag, rule: RuleEntry, cap: int = ORACLE_CAP) -> TransactionDB:
    """One transaction per sample-space tuple of every graph in the bag."""
    rule = ensure_valid(as_rule(rule))
    required = _check_cap(bag, rule, cap)
    rows: list[Itemset] = []
    for _, g in bag:
        rows.extend(_transactions(g, rule))
    logger.info("generated %d transactions for rule %s (expected %d)", len(rows), rule.name, required)
    return TransactionDB(tuple(rows))


@dataclass(frozen=True)
class MetricPair:
    metric: str
    gpar: MetricValue
    isar: MetricValue

    @property
    def equal(self) -> bool:
        return self.gpar.same_as(self.isar)


@dataclass(frozen=True)
class ReframeReport:
    rule_name: str
    regime: str
    db_size: int
    pairs: tuple[MetricPair, ...]

    @property
    def all_equal(self) -> bool:
        return all(pair.equal for pair in self.pairs)

    def to_rows(self) -> list[list[str]]:
        rows = [
            [self.rule_name, p.metric, str(p.gpar), str(p.isar), "EQUAL" if p.equal else "DIFF"]
            for p in self.pairs
        ]
        rows.append(["ALL_EQUAL", self.rule_name, "true" if self.all_equal else "false"])
        return rows


def check_correspondence(
    bag: GraphBag,
    rule: RuleEntry,
    cap: int = ORACLE_CAP,
    regime: Literal["micro", "macro"] = "micro",
) -> ReframeReport:
    """Compare graph-rule metrics with itemset metrics of {A} => {B}.

    The micro check uses one database for the whole bag. The macro check builds
    one database per graph and averages the itemset metrics per graph.
    """
    rule = ensure_valid(as_rule(rule))
    _check_cap(bag, rule, cap)
    if regime == "micro":
        report = metrics_micro(bag, rule)
        db = generate_transaction_db(bag, rule, cap)
        expected = isar.isar_metrics(db, REFRAMED_RULE)
        db_size = len(db)
    else:
        report = metrics_macro(bag, rule)
        per_graph = []
        db_size = 0
        for graph_id, g in bag:
            db = TransactionDB(tuple(_transactions(g, rule)))
            db_size += len(db)
            per_graph.append((graph_id, isar.isar_metrics(db, REFRAMED_RULE)))
        expected = {
            name: average_metric([(gid, values[name]) for gid, values in per_graph])
            for name in METRIC_COLUMNS
        }
    pairs = tuple(MetricPair(name, report.metric(name), expected[name]) for name in METRIC_COLUMNS)
    result = ReframeReport(rule.name, regime, db_size, pairs)
    if not result.all_equal:
        logger.warning("rule %s: reframed metrics disagree: %s", rule.name,
                       ", ".join(p.metric for p in pairs if not p.equal))
    return result
