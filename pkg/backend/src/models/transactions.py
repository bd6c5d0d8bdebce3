"""Transaction databases and itemset-based association rules."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Iterable, Iterator

from src.models.errors import ContractViolation

Itemset = frozenset[str]


def itemset(items: Iterable[str]) -> Itemset:
    return frozenset(sys.intern(item) for item in items)


@dataclass(frozen=True)
class TransactionDB:
    """Bag of itemsets; duplicate transactions keep their multiplicity."""

    transactions: tuple[Itemset, ...] = ()

    @classmethod
    def of(cls, *transactions: Iterable[str]) -> TransactionDB:
        return cls(tuple(itemset(t) for t in transactions))

    def __len__(self) -> int:
        return len(self.transactions)

    def __iter__(self) -> Iterator[Itemset]:
        return iter(self.transactions)


@dataclass(frozen=True)
class ISARule:
    antecedent: Itemset
    consequent: Itemset

    def __post_init__(self) -> None:
        object.__setattr__(self, "antecedent", itemset(self.antecedent))
        object.__setattr__(self, "consequent", itemset(self.consequent))
        if not self.antecedent or not self.consequent:
            raise ContractViolation("itemset rule needs non-empty antecedent and consequent")

    @property
    def partially_redundant(self) -> bool:
        return bool(self.antecedent & self.consequent) and not self.consequent <= self.antecedent

    def __str__(self) -> str:
        return "{" + ",".join(sorted(self.antecedent)) + "} => {" + ",".join(sorted(self.consequent)) + "}"
