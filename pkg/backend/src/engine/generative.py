"""Generative rule application: extension, closure and link prediction."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

from src.config.settings import MAX_CLOSURE_STEPS
from src.engine.gpar_metrics import metrics_single
from src.engine.matcher import apply_mapping, evaluate
from src.engine.rewriting import as_simplified
from src.models.errors import ContractViolation, OpenConsequentError, QueryError
from src.models.graph import Graph, Pattern
from src.models.mapping import Semantics
from src.models.metrics import MetricValue
from src.models.rule import RuleEntry, SimplifiedRule
from src.models.terms import Term, Triple

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Extension and closure
# ---------------------------------------------------------------------------

def _grounded(rule: RuleEntry) -> SimplifiedRule:
    simplified = as_simplified(rule)
    if not simplified.has_ground_consequent:
        free = " ".join(str(v) for v in simplified.free_consequent_variables)
        raise OpenConsequentError(
            f"rule {simplified.name}: consequent variables {free} are not bound by the antecedent; "
            "use predict_patterns instead"
        )
    return simplified


def _derived_triples(g: Graph, rule: SimplifiedRule) -> set[Triple]:
    derived: set[Triple] = set()
    for mu in evaluate(rule.p1, g, Semantics.NRA):
        derived.update(apply_mapping(mu, rule.p2pp).to_graph().triples)
    return derived


def extend_once(g: Graph, rule: RuleEntry) -> Graph:
    """g ∪ μ(p2) over every nra match μ of p1 in g."""
    return extend_all(g, [rule])


def extend_all(g: Graph, rules: Sequence[RuleEntry]) -> Graph:
    """One simultaneous step of several rules; every rule sees the same g."""
    grounded = [_grounded(r) for r in rules]
    derived: set[Triple] = set()
    for rule in grounded:
        derived |= _derived_triples(g, rule)
    return g.union(derived)


@dataclass(frozen=True)
class ClosureResult:
    graph: Graph
    steps_used: int
    fixpoint: bool


def closure_all(g: Graph, rules: Sequence[RuleEntry], max_steps: int = MAX_CLOSURE_STEPS) -> ClosureResult:
    """Apply ``extend_all`` until nothing changes or ``max_steps`` applications ran.

    ``steps_used`` counts the applications that added triples. The fixpoint is
    certified only when an application added nothing.
    """
    grounded = [_grounded(r) for r in rules]
    current, steps = g, 0
    for _ in range(max_steps):
        extended = extend_all(current, grounded)
        if extended == current:
            logger.info("closure fixpoint after %d steps, %d triples", steps, len(current))
            return ClosureResult(current, steps, True)
        current, steps = extended, steps + 1
        logger.debug("closure step %d: %d triples", steps, len(current))
    logger.warning("closure stopped after %d steps without a certified fixpoint", steps)
    return ClosureResult(current, steps, False)


def closure(g: Graph, rule: RuleEntry, max_steps: int = MAX_CLOSURE_STEPS) -> ClosureResult:
    return closure_all(g, [rule], max_steps)


# ---------------------------------------------------------------------------
# Prediction
# ---------------------------------------------------------------------------

def predict_patterns(g: Graph, rule: RuleEntry) -> list[Pattern]:
    """Distinct μ(p2) over nra matches of p1; ground ones are graphs."""
    simplified = as_simplified(rule)
    predicted = {apply_mapping(mu, simplified.p2pp) for mu in evaluate(simplified.p1, g, Semantics.NRA)}
    return sorted(predicted, key=lambda p: [tp.sort_key() for tp in p.sorted_triple_patterns()])


@dataclass(frozen=True)
class LinkQuery:
    """A triple with exactly one unknown position."""

    s: Term | None
    p: Term | None
    o: Term | None

    def __post_init__(self) -> None:
        holes = sum(x is None for x in (self.s, self.p, self.o))
        if holes != 1:
            raise QueryError(f"a link query needs exactly one hole, found {holes}")

    @property
    def hole(self) -> int:
        return (self.s, self.p, self.o).index(None)

    @property
    def task(self) -> str:
        return ("head", "relation", "tail")[self.hole]


@dataclass(frozen=True)
class Prediction:
    term: Term
    rule_name: str
    confidence: MetricValue

    def sort_key(self) -> tuple:
        # undefined confidence ranks below every defined one
        score = self.confidence.value if self.confidence.is_rational else -1
        return (-score, self.term.label, self.rule_name)


def link_predict(g: Graph, rules: Sequence[RuleEntry], query: LinkQuery) -> list[Prediction]:
    """Candidates for the hole of ``query``, best rule confidence first."""
    simplified = [as_simplified(r) for r in rules]
    for rule in simplified:
        if len(rule.p2pp) != 1:
            raise ContractViolation(f"rule {rule.name}: link prediction needs a single-triple consequent")

    wanted = (query.s, query.p, query.o)
    predictions: dict[tuple[Term, str], Prediction] = {}
    for rule in simplified:
        matches = evaluate(rule.p1, g, Semantics.NRA)
        if not matches:
            continue
        score = metrics_single(g, rule).confidence
        (consequent,) = rule.p2pp.triple_patterns
        for mu in matches:
            (predicted,) = apply_mapping(mu, Pattern([consequent])).triple_patterns
            if not all(w is None or w == x for w, x in zip(wanted, predicted)):
                continue
            candidate = predicted[query.hole]
            if isinstance(candidate, Term):
                predictions[(candidate, rule.name)] = Prediction(candidate, rule.name, score)
    ranked = sorted(predictions.values(), key=Prediction.sort_key)
    logger.info("%s prediction: %d candidates", query.task, len(ranked))
    return ranked
