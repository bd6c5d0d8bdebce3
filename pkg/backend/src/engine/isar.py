"""Itemset-based association rule metrics over transaction databases."""

from __future__ import annotations

from typing import Iterable

from src.engine import formulas
from src.models.graph import Graph, subgraph_contains
from src.models.metrics import EMPTY_DATABASE, MetricValue
from src.models.transactions import ISARule, TransactionDB, itemset


def absolute_support(db: TransactionDB, items: Iterable[str]) -> int:
    wanted = itemset(items)
    return sum(1 for t in db if wanted <= t)


def relative_support(db: TransactionDB, items: Iterable[str]) -> MetricValue:
    return formulas.support(absolute_support(db, items), len(db), EMPTY_DATABASE)


def rule_counts(db: TransactionDB, rule: ISARule) -> formulas.Counts:
    """(|T|, |E_A|, |E_B|, |E_A ∩ E_B|); E_A ∩ E_B is E_{A ∪ B}."""
    return (
        len(db),
        absolute_support(db, rule.antecedent),
        absolute_support(db, rule.consequent),
        absolute_support(db, rule.antecedent | rule.consequent),
    )


def confidence(db: TransactionDB, rule: ISARule) -> MetricValue:
    _, e1, _, joint = rule_counts(db, rule)
    return formulas.confidence(e1, joint)


def lift(db: TransactionDB, rule: ISARule) -> MetricValue:
    return formulas.lift(*rule_counts(db, rule))


def leverage(db: TransactionDB, rule: ISARule) -> MetricValue:
    return formulas.leverage(*rule_counts(db, rule), empty_reason=EMPTY_DATABASE)


def conviction(db: TransactionDB, rule: ISARule) -> MetricValue:
    return formulas.conviction(*rule_counts(db, rule))


def isar_metrics(db: TransactionDB, rule: ISARule) -> dict[str, MetricValue]:
    """All metrics of one rule, keyed like the report columns."""
    total, e1, e2, joint = counts = rule_counts(db, rule)
    return {
        "support1": formulas.support(e1, total, EMPTY_DATABASE),
        "support2": formulas.support(e2, total, EMPTY_DATABASE),
        "confidence": formulas.confidence(e1, joint),
        "lift": formulas.lift(*counts),
        "leverage": formulas.leverage(*counts, empty_reason=EMPTY_DATABASE),
        "conviction": formulas.conviction(*counts),
    }


def gar_check(s: Graph, g1: Graph, g2: Graph) -> tuple[bool, bool]:
    """Whether a GAR's antecedent and consequent graphs both occur in ``s``."""
    return subgraph_contains(s, g1), subgraph_contains(s, g2)


def is_trivial_isar(rule: ISARule) -> bool:
    return rule.consequent <= rule.antecedent
