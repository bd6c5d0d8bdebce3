"""Terms, variables and triples.

Terms are interned: constructing the same label twice returns the same object,
so equality and hashing reduce to identity on the integer handle.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import NamedTuple, Union

_interned: dict[str, "Term"] = {}
_intern_lock = threading.Lock()


class Term:
    __slots__ = ("label", "handle")

    label: str
    handle: int

    def __new__(cls, label: str) -> Term:
        term = _interned.get(label)
        if term is not None:
            return term
        with _intern_lock:
            term = _interned.get(label)
            if term is None:
                term = object.__new__(cls)
                term.label = label
                term.handle = len(_interned)
                _interned[label] = term
        return term

    def __reduce__(self):
        return (Term, (self.label,))

    def __copy__(self) -> Term:
        return self

    def __deepcopy__(self, memo) -> Term:
        return self

    def __hash__(self) -> int:
        return self.handle

    def __eq__(self, other: object) -> bool:
        return self is other

    def __lt__(self, other: Term) -> bool:
        return self.label < other.label

    @property
    def is_literal(self) -> bool:
        """Quoted labels such as ``"Alice"`` keep their quotes."""
        return len(self.label) >= 2 and self.label[0] == '"' and self.label[-1] == '"'

    def __repr__(self) -> str:
        return f"Term({self.label!r})"

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True, order=True, slots=True)
class Variable:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


Node = Union[Term, Variable]


class Triple(NamedTuple):
    s: Term
    p: Term
    o: Term

    def sort_key(self) -> tuple[str, str, str]:
        return (self.s.label, self.p.label, self.o.label)


class TriplePattern(NamedTuple):
    s: Node
    p: Node
    o: Node

    @property
    def variables(self) -> tuple[Variable, ...]:
        return tuple(x for x in self if isinstance(x, Variable))

    @property
    def terms(self) -> tuple[Term, ...]:
        return tuple(x for x in self if isinstance(x, Term))

    def sort_key(self) -> tuple[tuple[int, str], ...]:
        # variables sort before terms at each position
        return tuple((0, x.name) if isinstance(x, Variable) else (1, x.label) for x in self)


def node_sort_key(node: Node) -> tuple[int, str]:
    if isinstance(node, Variable):
        return (0, node.name)
    return (1, node.label)


def sorted_variables(variables) -> tuple[Variable, ...]:
    """Canonical variable order: lexicographic by name."""
    return tuple(sorted(variables, key=lambda v: v.name))
