"""Graphs, patterns and graph bags.

A graph is a finite set of ground triples; a pattern is a finite set of triple
patterns over terms and variables. Both are immutable once built.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Iterable, Iterator

from src.models.terms import Term, Triple, TriplePattern, Variable, sorted_variables


# ---------------------------------------------------------------------------
# Candidate index
# ---------------------------------------------------------------------------

class TripleIndex:
    """Triples of one graph grouped by subject, predicate and object."""

    __slots__ = ("all", "by_s", "by_p", "by_o")

    def __init__(self, triples: Iterable[Triple]) -> None:
        by_s: dict[Term, list[Triple]] = {}
        by_p: dict[Term, list[Triple]] = {}
        by_o: dict[Term, list[Triple]] = {}
        ordered = sorted(triples, key=Triple.sort_key)
        for triple in ordered:
            by_s.setdefault(triple.s, []).append(triple)
            by_p.setdefault(triple.p, []).append(triple)
            by_o.setdefault(triple.o, []).append(triple)
        self.all: tuple[Triple, ...] = tuple(ordered)
        self.by_s = {k: tuple(v) for k, v in by_s.items()}
        self.by_p = {k: tuple(v) for k, v in by_p.items()}
        self.by_o = {k: tuple(v) for k, v in by_o.items()}

    def candidates(self, s: Term | None, p: Term | None, o: Term | None) -> tuple[Triple, ...]:
        """Smallest indexed bucket consistent with the bound positions.

        The bucket may still hold triples that disagree on the other bound
        positions; callers filter while unifying.
        """
        best = self.all
        for key, table in ((s, self.by_s), (p, self.by_p), (o, self.by_o)):
            if key is None:
                continue
            bucket = table.get(key, ())
            if len(bucket) < len(best):
                best = bucket
                if not best:
                    break
        return best


# ---------------------------------------------------------------------------
# Graph
# ---------------------------------------------------------------------------

class Graph:
    __slots__ = ("triples", "term_set", "_index", "_index_lock")

    def __init__(self, triples: Iterable[Triple] = ()) -> None:
        self.triples: frozenset[Triple] = frozenset(triples)
        self.term_set: frozenset[Term] = frozenset(t for triple in self.triples for t in triple)
        self._index: TripleIndex | None = None
        self._index_lock = threading.Lock()

    @property
    def index(self) -> TripleIndex:
        """Built once, on first use, even under concurrent evaluators."""
        index = self._index
        if index is None:
            with self._index_lock:
                if self._index is None:
                    self._index = TripleIndex(self.triples)
                index = self._index
        return index

    def union(self, triples: Iterable[Triple]) -> Graph:
        extra = frozenset(triples)
        if extra <= self.triples:
            return self
        return Graph(self.triples | extra)

    def sorted_triples(self) -> list[Triple]:
        return sorted(self.triples, key=Triple.sort_key)

    def __len__(self) -> int:
        return len(self.triples)

    def __iter__(self) -> Iterator[Triple]:
        return iter(self.sorted_triples())

    def __contains__(self, triple: object) -> bool:
        return triple in self.triples

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.triples == other.triples

    def __hash__(self) -> int:
        return hash(self.triples)

    def __repr__(self) -> str:
        return f"Graph({len(self.triples)} triples, {len(self.term_set)} terms)"


def subgraph_contains(host: Graph, sub: Graph) -> bool:
    """GAR subset test: every triple of ``sub`` is a triple of ``host``."""
    return sub.triples <= host.triples


# ---------------------------------------------------------------------------
# Pattern
# ---------------------------------------------------------------------------

class Pattern:
    __slots__ = ("triple_patterns", "vars", "terms")

    def __init__(self, triple_patterns: Iterable[TriplePattern] = ()) -> None:
        self.triple_patterns: frozenset[TriplePattern] = frozenset(
            TriplePattern(*tp) for tp in triple_patterns
        )
        self.vars: frozenset[Variable] = frozenset(
            x for tp in self.triple_patterns for x in tp if isinstance(x, Variable)
        )
        self.terms: frozenset[Term] = frozenset(
            x for tp in self.triple_patterns for x in tp if isinstance(x, Term)
        )

    @property
    def is_ground(self) -> bool:
        return not self.vars

    @property
    def variables(self) -> tuple[Variable, ...]:
        return sorted_variables(self.vars)

    def to_graph(self) -> Graph:
        if self.vars:
            names = ", ".join(str(v) for v in self.variables)
            raise ValueError(f"pattern still has variables: {names}")
        return Graph(Triple(*tp) for tp in self.triple_patterns)

    def sorted_triple_patterns(self) -> list[TriplePattern]:
        return sorted(self.triple_patterns, key=TriplePattern.sort_key)

    def __len__(self) -> int:
        return len(self.triple_patterns)

    def __iter__(self) -> Iterator[TriplePattern]:
        return iter(self.sorted_triple_patterns())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.triple_patterns == other.triple_patterns

    def __hash__(self) -> int:
        return hash(self.triple_patterns)

    def __repr__(self) -> str:
        return f"Pattern({len(self.triple_patterns)} triple patterns, vars={[v.name for v in self.variables]})"


# ---------------------------------------------------------------------------
# Graph bag
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GraphBag:
    """Ordered bag of identified graphs; equal graphs may repeat, ids may not."""

    graphs: tuple[tuple[str, Graph], ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "graphs", tuple(self.graphs))
        seen: set[str] = set()
        for graph_id, _ in self.graphs:
            if graph_id in seen:
                raise ValueError(f"duplicate graph id {graph_id!r}")
            seen.add(graph_id)

    @classmethod
    def of(cls, *graphs: Graph) -> GraphBag:
        """Bag with generated ids ``g1``, ``g2``, ..."""
        return cls(tuple((f"g{i}", g) for i, g in enumerate(graphs, start=1)))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(graph_id for graph_id, _ in self.graphs)

    def filter(self, keep) -> GraphBag:
        return GraphBag(tuple((gid, g) for gid, g in self.graphs if keep(gid, g)))

    def __len__(self) -> int:
        return len(self.graphs)

    def __iter__(self) -> Iterator[tuple[str, Graph]]:
        return iter(self.graphs)
