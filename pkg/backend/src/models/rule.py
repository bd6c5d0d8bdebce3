"""GPAR rule objects.

``Rule`` is the full quadruple (p1, p2, V1, V2). ``SimplifiedRule`` is the
two-pattern form in which shared variable names carry the join.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from src.models.graph import Pattern
from src.models.terms import Node, Term, TriplePattern, Variable, node_sort_key, sorted_variables


@dataclass(frozen=True)
class Rule:
    name: str
    p1: Pattern
    p2: Pattern
    v1: tuple[Variable, ...]
    v2: tuple[Variable, ...]

    @property
    def n(self) -> int:
        return len(self.v1)


@dataclass(frozen=True)
class SimplifiedRule:
    name: str
    p1: Pattern
    p2pp: Pattern

    @property
    def shared_variables(self) -> tuple[Variable, ...]:
        return sorted_variables(self.p1.vars & self.p2pp.vars)

    @property
    def n(self) -> int:
        return len(self.p1.vars & self.p2pp.vars)

    @property
    def has_ground_consequent(self) -> bool:
        return self.p2pp.vars <= self.p1.vars

    @property
    def free_consequent_variables(self) -> tuple[Variable, ...]:
        return sorted_variables(self.p2pp.vars - self.p1.vars)


RuleEntry = Union[Rule, SimplifiedRule]


@dataclass(frozen=True)
class TrivialityWitness:
    """Injective map from p2's variables and terms into p1's."""

    mapping: tuple[tuple[Node, Node], ...]

    @classmethod
    def from_dict(cls, mapping: dict[Node, Node]) -> TrivialityWitness:
        return cls(tuple(sorted(mapping.items(), key=lambda item: node_sort_key(item[0]))))

    def as_dict(self) -> dict[Node, Node]:
        return dict(self.mapping)

    @property
    def is_injective(self) -> bool:
        images = [target for _, target in self.mapping]
        return len(set(images)) == len(images)

    @property
    def preserves_terms(self) -> bool:
        return all(source == target for source, target in self.mapping if isinstance(source, Term))

    def apply(self, pattern: Pattern) -> Pattern:
        m = self.as_dict()
        return Pattern(TriplePattern(*(m.get(x, x) for x in tp)) for tp in pattern.triple_patterns)

    def __str__(self) -> str:
        return " ".join(f"{source}->{target}" for source, target in self.mapping)
