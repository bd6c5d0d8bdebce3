"""Pattern evaluation under hom and nra semantics.

Backtracking over triple patterns. At every step the unmatched triple pattern
with the fewest candidate triples (given the current bindings) is expanded
next. Under nra, bindings that would repeat a term or take a pattern term are
rejected as soon as they are made.
"""

from __future__ import annotations

import logging
from typing import Iterable, Iterator, Sequence

from src.models.errors import ContractViolation, EmptyPatternError
from src.models.graph import Graph, Pattern
from src.models.mapping import Mapping, Semantics
from src.models.terms import Term, Triple, TriplePattern, Variable

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Search
# ---------------------------------------------------------------------------

def _bound(node, binding: dict[Variable, Term]) -> Term | None:
    if isinstance(node, Variable):
        return binding.get(node)
    return node


def _iter_bindings(
    pattern: Pattern,
    graph: Graph,
    semantics: Semantics,
    seed: dict[Variable, Term],
) -> Iterator[dict[Variable, Term]]:
    """Yield every total binding that extends ``seed``.

    The yielded dict is the live search state; copy it before keeping it.
    """
    index = graph.index
    injective = semantics is Semantics.NRA
    forbidden = pattern.terms if injective else frozenset()
    binding = dict(seed)
    used: set[Term] = set(binding.values())

    def unify(tp: TriplePattern, triple: Triple) -> list[Variable] | None:
        added: list[Variable] = []
        for node, term in zip(tp, triple):
            if isinstance(node, Term):
                if node is not term:
                    break
                continue
            current = binding.get(node)
            if current is not None:
                if current is not term:
                    break
                continue
            if injective and (term in used or term in forbidden):
                break
            binding[node] = term
            if injective:
                used.add(term)
            added.append(node)
        else:
            return added
        undo(added)
        return None

    def undo(added: list[Variable]) -> None:
        for var in added:
            term = binding.pop(var)
            if injective:
                used.discard(term)

    def extend(remaining: list[TriplePattern]) -> Iterator[dict[Variable, Term]]:
        if not remaining:
            yield binding
            return
        best_at, best = 0, None
        for at, tp in enumerate(remaining):
            cands = index.candidates(*(_bound(x, binding) for x in tp))
            if best is None or len(cands) < len(best):
                best_at, best = at, cands
                if not cands:
                    return
        tp = remaining[best_at]
        rest = remaining[:best_at] + remaining[best_at + 1:]
        for triple in best:
            added = unify(tp, triple)
            if added is None:
                continue
            yield from extend(rest)
            undo(added)

    yield from extend(list(pattern.triple_patterns))


def _canonical_order(matches: Iterable[Mapping]) -> list[Mapping]:
    return sorted(set(matches), key=Mapping.sort_key)


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------

def evaluate(pattern: Pattern, graph: Graph, semantics: Semantics = Semantics.NRA) -> list[Mapping]:
    """All matches of ``pattern`` in ``graph``, sorted by bound-term tuples."""
    if not pattern.triple_patterns:
        raise EmptyPatternError("cannot evaluate an empty pattern")
    matches = _canonical_order(
        Mapping.from_dict(b) for b in _iter_bindings(pattern, graph, semantics, {})
    )
    logger.debug("%s evaluation: %d matches over %d triples", semantics.value, len(matches), len(graph))
    return matches


def has_match(pattern: Pattern, graph: Graph, semantics: Semantics = Semantics.NRA) -> bool:
    if not pattern.triple_patterns:
        raise EmptyPatternError("cannot evaluate an empty pattern")
    return next(_iter_bindings(pattern, graph, semantics, {}), None) is not None


def apply_mapping(mu: Mapping, pattern: Pattern) -> Pattern:
    """Replace bound variables by their terms; unbound ones pass through."""
    bindings = mu.as_dict()
    return Pattern(
        TriplePattern(*(bindings.get(x, x) if isinstance(x, Variable) else x for x in tp))
        for tp in pattern.triple_patterns
    )


def project(matches: Iterable[Mapping], variables: Sequence[Variable]) -> set[tuple[Term, ...]]:
    projected = set()
    for mu in matches:
        bindings = mu.as_dict()
        try:
            projected.add(tuple(bindings[v] for v in variables))
        except KeyError as exc:
            raise ContractViolation(f"variable {exc.args[0]} is not bound by the match") from None
    return projected


def m_g(
    graph: Graph,
    terms: Sequence[Term],
    pattern: Pattern,
    variables: Sequence[Variable],
    semantics: Semantics = Semantics.NRA,
) -> bool:
    """True iff some match binds ``variables`` to ``terms`` position-wise."""
    if len(terms) != len(variables):
        raise ContractViolation(f"{len(terms)} terms for {len(variables)} variables")
    if len(set(variables)) != len(variables):
        raise ContractViolation("variable sequence repeats a variable")
    missing = [str(v) for v in variables if v not in pattern.vars]
    if missing:
        raise ContractViolation(f"variables not in pattern: {' '.join(missing)}")
    if not pattern.triple_patterns:
        raise EmptyPatternError("cannot evaluate an empty pattern")
    if semantics is Semantics.NRA:
        if len(set(terms)) != len(terms) or any(t in pattern.terms for t in terms):
            return False
    seed = dict(zip(variables, terms))
    return next(_iter_bindings(pattern, graph, semantics, seed), None) is not None
