"""
SPARQL CONSTRUCT and SWRL export of simplified rules.

Both encodings spell out nra semantics as explicit inequalities: every pair of
antecedent variables must differ, and no antecedent variable may take one of
the constrained pattern terms.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass
from itertools import combinations
from typing import Literal
from urllib.parse import quote

from rdflib.plugins.sparql.parser import parseQuery

from src.config.settings import DEFAULT_NAMESPACE, SWRL_PREFIX
from src.engine.rewriting import as_simplified
from src.models.errors import ExportError
from src.models.graph import Pattern
from src.models.rule import RuleEntry, SimplifiedRule
from src.models.terms import Node, Term, Variable, sorted_variables

logger = logging.getLogger(__name__)

TermScope = Literal["antecedent", "rule"]

_VARNAME = re.compile(r"^[A-Za-z0-9_]+$")


# ---------------------------------------------------------------------------
# Inequalities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NraConstraints:
    variable_pairs: tuple[tuple[Variable, Variable], ...]
    variable_terms: tuple[tuple[Variable, Term], ...]

    def __len__(self) -> int:
        return len(self.variable_pairs) + len(self.variable_terms)


def nra_constraints(rule: SimplifiedRule, term_scope: TermScope = "antecedent") -> NraConstraints:
    """Inequalities over the antecedent variables.

    ``term_scope="antecedent"`` constrains against the antecedent's terms;
    ``"rule"`` adds the consequent's terms as well.
    """
    variables = sorted_variables(rule.p1.vars)
    terms = rule.p1.terms if term_scope == "antecedent" else rule.p1.terms | rule.p2pp.terms
    return NraConstraints(
        variable_pairs=tuple(combinations(variables, 2)),
        variable_terms=tuple((v, t) for v in variables for t in sorted(terms)),
    )


def _check_variable_names(rule: SimplifiedRule) -> None:
    bad = sorted(v.name for v in rule.p1.vars | rule.p2pp.vars if not _VARNAME.match(v.name))
    if bad:
        raise ExportError(f"rule {rule.name}: variable names not exportable: {', '.join(bad)}")


# ---------------------------------------------------------------------------
# SPARQL
# ---------------------------------------------------------------------------

def _sparql_literal(label: str) -> str:
    inner = label[1:-1].replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return f'"{inner}"'


def _local_name(label: str) -> str:
    """Percent-encoded local name; raw bytes kept by the parser encode as themselves."""
    return quote(label.encode("utf-8", "surrogateescape"), safe="-._~")


def _sparql_node(node: Node, namespace: str) -> str:
    if isinstance(node, Variable):
        return f"?{node.name}"
    if node.is_literal:
        return _sparql_literal(node.label)
    return f"<{namespace}{_local_name(node.label)}>"


def _sparql_block(pattern: Pattern, namespace: str) -> list[str]:
    return [
        "  " + " ".join(_sparql_node(x, namespace) for x in tp) + " ."
        for tp in pattern.sorted_triple_patterns()
    ]


def to_sparql_construct(
    rule: RuleEntry,
    namespace: str = DEFAULT_NAMESPACE,
    term_scope: TermScope = "antecedent",
) -> str:
    simplified = as_simplified(rule)
    _check_variable_names(simplified)
    constraints = nra_constraints(simplified, term_scope)
    clauses = [f"?{a.name} != ?{b.name}" for a, b in constraints.variable_pairs]
    clauses += [f"?{v.name} != {_sparql_node(t, namespace)}" for v, t in constraints.variable_terms]

    lines = ["CONSTRUCT {", *_sparql_block(simplified.p2pp, namespace), "}", "WHERE {"]
    lines += _sparql_block(simplified.p1, namespace)
    if clauses:
        lines.append("  FILTER (")
        lines += [f"    {clause}" + (" &&" if i < len(clauses) - 1 else "") for i, clause in enumerate(clauses)]
        lines.append("  )")
    lines.append("}")
    logger.debug("rule %s: SPARQL export with %d filter clauses", simplified.name, len(clauses))
    return "\n".join(lines) + "\n"


def validate_sparql(query: str) -> None:
    """Re-parse an exported query with rdflib's SPARQL grammar."""
    try:
        parseQuery(query)
    except Exception as exc:  # pyparsing raises its own hierarchy
        raise ExportError(f"exported SPARQL does not parse: {exc}") from exc


# ---------------------------------------------------------------------------
# SWRL
# ---------------------------------------------------------------------------

def _swrl_arg(node: Node, prefix: str) -> str:
    if isinstance(node, Variable):
        return f"?{node.name}"
    if node.is_literal:
        return _sparql_literal(node.label)
    return f"{prefix}:{_local_name(node.label)}"


def _swrl_atoms(pattern: Pattern, prefix: str) -> list[str]:
    atoms = []
    for s, p, o in pattern.sorted_triple_patterns():
        atoms.append(f"{prefix}:{_local_name(p.label)}({_swrl_arg(s, prefix)}, {_swrl_arg(o, prefix)})")
    return atoms


def to_swrl(
    rule: RuleEntry,
    namespace: str = DEFAULT_NAMESPACE,
    term_scope: TermScope = "antecedent",
    prefix: str = SWRL_PREFIX,
) -> str:
    """Human-readable SWRL; ``prefix`` abbreviates ``namespace``."""
    simplified = as_simplified(rule)
    _check_variable_names(simplified)
    for which, pattern in (("antecedent", simplified.p1), ("consequent", simplified.p2pp)):
        for tp in pattern.sorted_triple_patterns():
            if isinstance(tp.p, Variable):
                raise ExportError(
                    f"rule {simplified.name}: variable {tp.p} in predicate position of the {which}; "
                    "this is not allowed in SWRL"
                )
            if tp.p.is_literal:
                raise ExportError(f"rule {simplified.name}: literal {tp.p.label} used as a property")

    constraints = nra_constraints(simplified, term_scope)
    body = _swrl_atoms(simplified.p1, prefix)
    body += [f"swrlb:notEqual(?{a.name}, ?{b.name})" for a, b in constraints.variable_pairs]
    body += [f"swrlb:notEqual(?{v.name}, {_swrl_arg(t, prefix)})" for v, t in constraints.variable_terms]
    head = _swrl_atoms(simplified.p2pp, prefix)
    return f"# {prefix}: <{namespace}>\n" + " ^\n".join(body) + "\n-> " + " ^ ".join(head) + "\n"
