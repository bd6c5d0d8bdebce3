"""Metric formulas over event counts.

Every metric here is a function of four counts: the sample-space size, the
antecedent event size, the consequent event size and the joint event size.
Itemset rules and graph rules both reduce to these counts.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Callable

from src.models.metrics import (
    ANTECEDENT_OR_CONSEQUENT_UNMATCHED,
    ANTECEDENT_UNMATCHED,
    CONVICTION_CONDITION,
    EMPTY_SAMPLE_SPACE,
    MetricValue,
)

Counts = tuple[int, int, int, int]  # (total, e1, e2, joint)

# Count-level definedness condition of each metric.
METRIC_CONDITIONS: dict[str, Callable[[int, int, int, int], bool]] = {
    "support": lambda total, e1, e2, joint: total > 0,
    "confidence": lambda total, e1, e2, joint: e1 > 0,
    "lift": lambda total, e1, e2, joint: e1 > 0 and e2 > 0,
    "leverage": lambda total, e1, e2, joint: total > 0,
    "conviction": lambda total, e1, e2, joint: e1 > 0 and e2 < total,
}

METRIC_REASONS: dict[str, str] = {
    "support": EMPTY_SAMPLE_SPACE,
    "confidence": ANTECEDENT_UNMATCHED,
    "lift": ANTECEDENT_OR_CONSEQUENT_UNMATCHED,
    "leverage": EMPTY_SAMPLE_SPACE,
    "conviction": CONVICTION_CONDITION,
}


def support(count: int, total: int, empty_reason: str = EMPTY_SAMPLE_SPACE) -> MetricValue:
    if total == 0:
        return MetricValue.undefined(empty_reason)
    return MetricValue.rational(Fraction(count, total))


def confidence(e1: int, joint: int) -> MetricValue:
    if e1 == 0:
        return MetricValue.undefined(ANTECEDENT_UNMATCHED)
    return MetricValue.rational(Fraction(joint, e1))


def lift(total: int, e1: int, e2: int, joint: int) -> MetricValue:
    if e1 == 0 or e2 == 0:
        return MetricValue.undefined(ANTECEDENT_OR_CONSEQUENT_UNMATCHED)
    return MetricValue.rational(Fraction(joint * total, e1 * e2))


def leverage(total: int, e1: int, e2: int, joint: int, empty_reason: str = EMPTY_SAMPLE_SPACE) -> MetricValue:
    if total == 0:
        return MetricValue.undefined(empty_reason)
    return MetricValue.rational(Fraction(joint, total) - Fraction(e1 * e2, total * total))


def conviction(total: int, e1: int, e2: int, joint: int) -> MetricValue:
    """(1 - P(E2)) / (1 - P(E2 | E1)); infinite when confidence is 1."""
    if e1 == 0 or e2 == total:
        return MetricValue.undefined(CONVICTION_CONDITION)
    if joint == e1:
        return MetricValue.infinity()
    return MetricValue.rational((1 - Fraction(e2, total)) / (1 - Fraction(joint, e1)))


def antecedent_weighted_conviction(total: int, e1: int, e2: int, joint: int) -> MetricValue:
    """P(E1)·(1 - P(E2)) / (1 - P(E2 | E1)).

    Kept apart from ``conviction``; it does not satisfy the conviction
    characteristics (independence does not give 1).
    """
    if e1 == 0 or e2 == total:
        return MetricValue.undefined(CONVICTION_CONDITION)
    if joint == e1:
        return MetricValue.infinity()
    return MetricValue.rational(
        Fraction(e1, total) * (1 - Fraction(e2, total)) / (1 - Fraction(joint, e1))
    )


def condition_holds(metric: str, counts: Counts) -> bool:
    try:
        return METRIC_CONDITIONS[metric](*counts)
    except KeyError:
        raise ValueError(f"unknown metric {metric!r}; choose from {sorted(METRIC_CONDITIONS)}") from None
