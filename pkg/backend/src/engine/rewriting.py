"""Rule validation, rewriting between the two rule forms, and triviality."""

from __future__ import annotations

import logging
from typing import Iterator

from src.models.errors import ContractViolation, EmptyJoinError
from src.models.graph import Pattern
from src.models.rule import Rule, RuleEntry, SimplifiedRule, TrivialityWitness
from src.models.terms import Node, Term, TriplePattern, Variable, sorted_variables

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------

def validate(rule: Rule) -> list[str]:
    """Names of every violated well-formedness condition; empty when valid."""
    violations = []
    if not rule.p1.vars:
        violations.append("antecedent has no variables")
    if not rule.p2.vars:
        violations.append("consequent has no variables")
    if not rule.v1:
        violations.append("empty V1")
    if not rule.v2:
        violations.append("empty V2")
    if len(set(rule.v1)) != len(rule.v1):
        violations.append("repetitive V1")
    if len(set(rule.v2)) != len(rule.v2):
        violations.append("repetitive V2")
    if len(rule.v1) != len(rule.v2):
        violations.append("length mismatch")
    if not set(rule.v1) <= rule.p1.vars:
        violations.append("V1 not in antecedent")
    if not set(rule.v2) <= rule.p2.vars:
        violations.append("V2 not in consequent")
    return violations


def ensure_valid(rule: Rule) -> Rule:
    violations = validate(rule)
    if violations:
        raise ContractViolation(f"rule {rule.name}: {'; '.join(violations)}")
    return rule


# ---------------------------------------------------------------------------
# Simplified form
# ---------------------------------------------------------------------------

def _substitute(pattern: Pattern, renaming: dict[Variable, Variable]) -> Pattern:
    """Simultaneous substitution of variables."""
    return Pattern(
        TriplePattern(*(renaming.get(x, x) if isinstance(x, Variable) else x for x in tp))
        for tp in pattern.triple_patterns
    )


def _fresh_names(used: set[str]) -> Iterator[Variable]:
    k = 1
    while True:
        name = f"v{k}"
        if name not in used:
            used.add(name)
            yield Variable(name)
        k += 1


def to_simplified(rule: Rule) -> SimplifiedRule:
    """Rewrite (p1, p2, V1, V2) so that shared variable names carry the join.

    Consequent variables that clash with antecedent variables without being
    joined get fresh names ``v<k>`` (smallest unused k, in name order). Then
    each V2 variable is replaced by its V1 partner.
    """
    ensure_valid(rule)
    clashing = sorted_variables(rule.p1.vars & (rule.p2.vars - set(rule.v2)))
    fresh = _fresh_names({v.name for v in rule.p1.vars | rule.p2.vars})
    renamed = _substitute(rule.p2, {v: next(fresh) for v in clashing})
    p2pp = _substitute(renamed, dict(zip(rule.v2, rule.v1)))
    return SimplifiedRule(rule.name, rule.p1, p2pp)


def from_simplified(simplified: SimplifiedRule) -> Rule:
    shared = simplified.shared_variables
    if not shared:
        raise EmptyJoinError(f"rule {simplified.name}: antecedent and consequent share no variables")
    return Rule(simplified.name, simplified.p1, simplified.p2pp, shared, shared)


def as_rule(entry: RuleEntry) -> Rule:
    if isinstance(entry, SimplifiedRule):
        return from_simplified(entry)
    return entry


def as_simplified(entry: RuleEntry) -> SimplifiedRule:
    if isinstance(entry, Rule):
        return to_simplified(entry)
    return entry


# ---------------------------------------------------------------------------
# Triviality
# ---------------------------------------------------------------------------

def _search_witness(p1: Pattern, p2: Pattern, terms_to_variables: bool) -> dict[Node, Node] | None:
    targets = sorted(p1.triple_patterns, key=TriplePattern.sort_key)
    sources = sorted(p2.triple_patterns, key=TriplePattern.sort_key)
    mapping: dict[Node, Node] = {}
    image: set[Node] = set()

    def assign(source: Node, target: Node, added: list[Node]) -> bool:
        if source in mapping:
            return mapping[source] == target
        if target in image:
            return False
        if isinstance(source, Variable):
            if not isinstance(target, Variable):
                return False
        elif target != source and not (terms_to_variables and isinstance(target, Variable)):
            return False
        mapping[source] = target
        image.add(target)
        added.append(source)
        return True

    def undo(added: list[Node]) -> None:
        for source in added:
            image.discard(mapping.pop(source))

    def extend(at: int) -> bool:
        if at == len(sources):
            return True
        for target in targets:
            added: list[Node] = []
            if all(assign(x, y, added) for x, y in zip(sources[at], target)):
                if extend(at + 1):
                    return True
            undo(added)
        return False

    return dict(mapping) if extend(0) else None


def is_trivial(rule: RuleEntry) -> tuple[bool, TrivialityWitness | None]:
    """Whether p2 is an instantiation of a pattern subgraph-isomorphic to p1.

    The joining variables play no part. A witness mapping every term to
    itself is preferred over one that sends terms to variables.
    """
    p1 = rule.p1
    p2 = rule.p2pp if isinstance(rule, SimplifiedRule) else rule.p2
    for terms_to_variables in (False, True):
        found = _search_witness(p1, p2, terms_to_variables)
        if found is not None:
            logger.debug("rule %s is trivial (terms to variables: %s)", rule.name, terms_to_variables)
            return True, TrivialityWitness.from_dict(found)
    return False, None
