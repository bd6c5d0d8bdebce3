"""Metric values, event statistics and metric reports.

All arithmetic is exact: rationals are ``fractions.Fraction`` and counts are
Python integers. Undefinedness is data, not an exception.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from decimal import Decimal, localcontext
from enum import Enum
from fractions import Fraction

from src.models.errors import ContractViolation


class MetricKind(str, Enum):
    RATIONAL = "rational"
    INFINITY = "infinity"
    UNDEFINED = "undefined"


# Undefinedness reasons
EMPTY_SAMPLE_SPACE = "empty-sample-space"
EMPTY_DATABASE = "empty-transaction-database"
EMPTY_BAG = "empty-bag"
ANTECEDENT_UNMATCHED = "antecedent-unmatched"
ANTECEDENT_OR_CONSEQUENT_UNMATCHED = "antecedent-or-consequent-unmatched"
CONVICTION_CONDITION = "antecedent-unmatched-or-consequent-certain"


@dataclass(frozen=True)
class MetricValue:
    kind: MetricKind
    value: Fraction | None = None
    reason: str = ""
    violators: tuple[str, ...] = ()

    @classmethod
    def rational(cls, value: Fraction | int) -> MetricValue:
        return cls(MetricKind.RATIONAL, Fraction(value))

    @classmethod
    def infinity(cls) -> MetricValue:
        return cls(MetricKind.INFINITY)

    @classmethod
    def undefined(cls, reason: str, violators: tuple[str, ...] = ()) -> MetricValue:
        return cls(MetricKind.UNDEFINED, reason=reason, violators=tuple(violators))

    @property
    def is_defined(self) -> bool:
        return self.kind is not MetricKind.UNDEFINED

    @property
    def is_infinite(self) -> bool:
        return self.kind is MetricKind.INFINITY

    @property
    def is_rational(self) -> bool:
        return self.kind is MetricKind.RATIONAL

    def same_as(self, other: MetricValue) -> bool:
        """Exact equality; two undefined values agree regardless of reason."""
        if self.kind is not other.kind:
            return False
        if self.kind is MetricKind.RATIONAL:
            return self.value == other.value
        return True

    def exceeds(self, bound: Fraction | int) -> bool:
        if self.is_infinite:
            return True
        return self.is_rational and self.value > bound

    def below(self, bound: Fraction | int) -> bool:
        return self.is_rational and self.value < bound

    def equals(self, bound: Fraction | int) -> bool:
        return self.is_rational and self.value == bound

    def decimal(self, digits: int) -> str:
        if self.kind is MetricKind.RATIONAL:
            with localcontext() as ctx:
                ctx.prec = digits + 40
                approx = Decimal(self.value.numerator) / Decimal(self.value.denominator)
                return f"{approx:.{digits}f}"
        return str(self)

    def __str__(self) -> str:
        if self.kind is MetricKind.RATIONAL:
            return str(self.value)
        if self.kind is MetricKind.INFINITY:
            return "inf"
        text = f"undef:{self.reason}"
        if self.violators:
            text += "@" + ",".join(self.violators)
        return text


class Regime(str, Enum):
    SINGLE = "single"
    MICRO = "micro"
    MACRO = "macro"


class Situation(str, Enum):
    IDE = "IDE"      # E1 = E2
    DIS = "DIS"      # E1 ∩ E2 = ∅
    IND = "IND"      # P(E1 ∩ E2) = P(E1)·P(E2)
    POS = "POS"
    NEG = "NEG"
    MIXED = "MIXED"  # macro only: graphs disagree


@dataclass(frozen=True)
class EventStats:
    n: int
    tau_card: int
    e1_card: int
    e2_card: int
    joint_card: int
    graph_id: str | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.joint_card <= min(self.e1_card, self.e2_card):
            raise ContractViolation(f"joint count out of range: {self}")
        if max(self.e1_card, self.e2_card) > self.tau_card:
            raise ContractViolation(f"event count exceeds sample space: {self}")

    def __add__(self, other: EventStats) -> EventStats:
        if self.n != other.n:
            raise ContractViolation("cannot pool statistics over different tuple lengths")
        return EventStats(
            n=self.n,
            tau_card=self.tau_card + other.tau_card,
            e1_card=self.e1_card + other.e1_card,
            e2_card=self.e2_card + other.e2_card,
            joint_card=self.joint_card + other.joint_card,
        )

    def counts(self) -> tuple[int, int, int, int]:
        return (self.tau_card, self.e1_card, self.e2_card, self.joint_card)


METRIC_COLUMNS = ("support1", "support2", "confidence", "lift", "leverage", "conviction")
REPORT_HEADER = ("rule_id", "regime", "tau", "e1", "e2", "joint") + METRIC_COLUMNS


@dataclass(frozen=True)
class MetricReport:
    rule_name: str
    regime: Regime
    stats: EventStats
    support_p1: MetricValue
    support_p2: MetricValue
    confidence: MetricValue
    lift: MetricValue
    leverage: MetricValue
    conviction: MetricValue
    antecedent_weighted_conviction: MetricValue
    per_graph: tuple[EventStats, ...] = field(default_factory=tuple)
    applicability: MetricValue | None = None

    def metric(self, name: str) -> MetricValue:
        return {
            "support1": self.support_p1,
            "support2": self.support_p2,
            "confidence": self.confidence,
            "lift": self.lift,
            "leverage": self.leverage,
            "conviction": self.conviction,
        }[name]

    def metric_values(self) -> list[MetricValue]:
        return [self.metric(name) for name in METRIC_COLUMNS]

    def to_row(self, decimal_digits: int | None = None) -> list[str]:
        row = [self.rule_name, self.regime.value, *(str(c) for c in self.stats.counts())]
        row += [str(v) for v in self.metric_values()]
        if self.applicability is not None:
            row.append(str(self.applicability))
        if decimal_digits is not None:
            row += ["~" + v.decimal(decimal_digits) for v in self.metric_values()]
        return row
