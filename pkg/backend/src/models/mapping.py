"""Match mappings and evaluation semantics."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterator

from src.models.terms import Term, Variable


class Semantics(str, Enum):
    HOM = "hom"   # any assignment whose embedding lies in the graph
    NRA = "nra"   # injective, and never onto a term of the pattern


@dataclass(frozen=True)
class Mapping:
    """Variable-to-term bindings, kept sorted by variable name."""

    bindings: tuple[tuple[Variable, Term], ...] = ()

    @classmethod
    def from_dict(cls, bindings: dict[Variable, Term]) -> Mapping:
        return cls(tuple(sorted(bindings.items(), key=lambda item: item[0].name)))

    def as_dict(self) -> dict[Variable, Term]:
        return dict(self.bindings)

    @property
    def domain(self) -> frozenset[Variable]:
        return frozenset(v for v, _ in self.bindings)

    def get(self, var: Variable, default: Term | None = None) -> Term | None:
        for v, t in self.bindings:
            if v == var:
                return t
        return default

    def __getitem__(self, var: Variable) -> Term:
        term = self.get(var)
        if term is None:
            raise KeyError(var)
        return term

    def __contains__(self, var: object) -> bool:
        return any(v == var for v, _ in self.bindings)

    def __iter__(self) -> Iterator[tuple[Variable, Term]]:
        return iter(self.bindings)

    def __len__(self) -> int:
        return len(self.bindings)

    def sort_key(self) -> tuple[str, ...]:
        return tuple(t.label for _, t in self.bindings)

    def is_injective(self) -> bool:
        return len({t for _, t in self.bindings}) == len(self.bindings)
