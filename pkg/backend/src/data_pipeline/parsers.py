"""
Parsers and serializers for the text formats.

Graph files hold one triple per line. Graph-bag and pattern-bag files split
their content with ``@graph <id>`` / ``@pattern <id>`` headers. Rule files hold
``@rule`` blocks. Transaction files hold one itemset per line. In every format
``#`` starts a comment, blank lines are ignored, ``?name`` is a variable and a
double-quoted token is a literal label that may contain whitespace. Only a
line-leading ``@`` keyword is a directive; elsewhere ``@name`` is a label.
Files are read as UTF-8, and undecodable bytes survive as surrogate escapes.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable, NamedTuple, TypeVar

from src.config.settings import FIXTURES_DIR
from src.models.errors import NameClashError, ParseError
from src.models.graph import Graph, GraphBag, Pattern
from src.models.mapping import Mapping
from src.models.rule import Rule, RuleEntry, SimplifiedRule
from src.models.terms import Node, Term, Triple, TriplePattern, Variable
from src.models.transactions import TransactionDB, itemset

logger = logging.getLogger(__name__)

T = TypeVar("T")

EMPTY_TRANSACTION = "-"

DIRECTIVES = frozenset({"@graph", "@pattern", "@rule", "@antecedent", "@consequent", "@join"})


# ---------------------------------------------------------------------------
# Tokens
# ---------------------------------------------------------------------------

class Token(NamedTuple):
    text: str
    quoted: bool

    @property
    def is_directive(self) -> bool:
        return not self.quoted and self.text in DIRECTIVES


def tokenize(line: str, lineno: int = 0) -> list[Token]:
    """Split one line into tokens, honouring quotes and trailing comments."""
    tokens: list[Token] = []
    i, n = 0, len(line)
    while i < n:
        ch = line[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "#":
            break
        if ch != '"':
            j = i
            while j < n and not line[j].isspace():
                j += 1
            tokens.append(Token(line[i:j], quoted=False))
            i = j
            continue

        buf: list[str] = []
        j = i + 1
        while True:
            if j >= n:
                raise ParseError("unterminated quoted label", lineno)
            c = line[j]
            if c == "\\":
                if j + 1 >= n or line[j + 1] not in '"\\':
                    raise ParseError("only \\\" and \\\\ escapes are allowed", lineno)
                buf.append(line[j + 1])
                j += 2
                continue
            if c == '"':
                break
            buf.append(c)
            j += 1
        j += 1
        if j < n and not line[j].isspace():
            raise ParseError("quoted label must be followed by whitespace", lineno)
        tokens.append(Token('"' + "".join(buf) + '"', quoted=True))
        i = j
    return tokens


def _lines(text: str):
    for lineno, line in enumerate(text.splitlines(), start=1):
        tokens = tokenize(line, lineno)
        if tokens:
            yield lineno, tokens


def _directive(tokens: list[Token], lineno: int) -> str | None:
    """The directive a line opens with, if any.

    A leading ``@`` token that is no known directive still reads as a subject
    when the line has three tokens, so ``@bob knows alice`` is a triple.
    """
    head = tokens[0]
    if head.is_directive:
        return head.text
    if not head.quoted and head.text.startswith("@") and len(tokens) != 3:
        raise ParseError(f"unknown directive {head.text}", lineno)
    return None


def _node(token: Token, lineno: int) -> Node:
    if not token.quoted and token.text.startswith("?"):
        name = token.text[1:]
        if not name:
            raise ParseError("variable without a name", lineno)
        return Variable(name)
    return Term(token.text)


def _triple(tokens: list[Token], lineno: int) -> Triple:
    if len(tokens) != 3:
        raise ParseError(f"expected 3 tokens, found {len(tokens)}", lineno)
    for token in tokens:
        if not token.quoted and token.text.startswith("?"):
            raise ParseError(f"variable {token.text} in a graph file", lineno)
    return Triple(*(Term(t.text) for t in tokens))


def _triple_pattern(tokens: list[Token], lineno: int) -> TriplePattern:
    if len(tokens) != 3:
        raise ParseError(f"expected 3 tokens, found {len(tokens)}", lineno)
    return TriplePattern(*(_node(t, lineno) for t in tokens))


def _check_names(triple_patterns: list[TriplePattern], lineno: int | None) -> None:
    var_names = {x.name for tp in triple_patterns for x in tp if isinstance(x, Variable)}
    labels = {x.label for tp in triple_patterns for x in tp if isinstance(x, Term)}
    clash = sorted(var_names & labels)
    if clash:
        raise NameClashError(f"label used as variable and term: {', '.join(clash)}", lineno)


def _header_id(tokens: list[Token], lineno: int) -> str:
    if len(tokens) != 2:
        raise ParseError(f"{tokens[0].text} needs exactly one identifier", lineno)
    return tokens[1].text


# ---------------------------------------------------------------------------
# Graphs and patterns
# ---------------------------------------------------------------------------

def parse_graph(text: str) -> Graph:
    """Graph files have no directives: every three-token line is a triple."""
    triples = []
    for lineno, tokens in _lines(text):
        if tokens[0].is_directive and len(tokens) != 3:
            raise ParseError(f"unexpected directive {tokens[0].text} in a graph file", lineno)
        triples.append(_triple(tokens, lineno))
    return Graph(triples)


def parse_pattern(text: str) -> Pattern:
    triple_patterns = []
    first = None
    for lineno, tokens in _lines(text):
        if tokens[0].is_directive and len(tokens) != 3:
            raise ParseError(f"unexpected directive {tokens[0].text} in a pattern block", lineno)
        first = first or lineno
        triple_patterns.append(_triple_pattern(tokens, lineno))
    _check_names(triple_patterns, first)
    return Pattern(triple_patterns)


def _parse_sections(text: str, header: str, build: Callable[[list, int], T],
                    parse_line: Callable[[list[Token], int], object]) -> list[tuple[str, T]]:
    sections: list[tuple[str, T]] = []
    current_id: str | None = None
    current: list = []
    start = 0
    seen: set[str] = set()

    def close() -> None:
        if current_id is not None:
            sections.append((current_id, build(current, start)))

    for lineno, tokens in _lines(text):
        directive = _directive(tokens, lineno)
        if directive is not None:
            if directive != header:
                raise ParseError(f"unknown directive {directive}", lineno)
            close()
            current_id = _header_id(tokens, lineno)
            if current_id in seen:
                raise ParseError(f"duplicate id {current_id!r}", lineno)
            seen.add(current_id)
            current, start = [], lineno
            continue
        if current_id is None:
            raise ParseError(f"content before the first {header} header", lineno)
        current.append(parse_line(tokens, lineno))
    close()
    return sections


def parse_graph_bag(text: str) -> GraphBag:
    sections = _parse_sections(text, "@graph", lambda triples, _: Graph(triples), _triple)
    logger.debug("parsed graph bag with %d graphs", len(sections))
    return GraphBag(tuple(sections))


def parse_pattern_bag(text: str) -> list[tuple[str, Pattern]]:
    def build(triple_patterns: list[TriplePattern], lineno: int) -> Pattern:
        _check_names(triple_patterns, lineno)
        return Pattern(triple_patterns)

    return _parse_sections(text, "@pattern", build, _triple_pattern)


# ---------------------------------------------------------------------------
# Rules
# ---------------------------------------------------------------------------

def _join_pair(token: Token, lineno: int) -> tuple[Variable, Variable]:
    left, sep, right = token.text.partition("=")
    if token.quoted or not sep or not left.startswith("?") or not right.startswith("?"):
        raise ParseError(f"join entries look like ?a=?x, got {token.text!r}", lineno)
    return Variable(left[1:]), Variable(right[1:])


class _RuleDraft:
    def __init__(self, name: str, lineno: int) -> None:
        self.name = name
        self.lineno = lineno
        self.antecedent: list[TriplePattern] | None = None
        self.consequent: list[TriplePattern] | None = None
        self.join: list[tuple[Variable, Variable]] | None = None

    def build(self) -> RuleEntry:
        if self.antecedent is None or self.consequent is None:
            raise ParseError(f"rule {self.name!r} needs @antecedent and @consequent", self.lineno)
        _check_names(self.antecedent + self.consequent, self.lineno)
        p1, p2 = Pattern(self.antecedent), Pattern(self.consequent)
        if self.join is None:
            return SimplifiedRule(self.name, p1, p2)
        return Rule(
            self.name, p1, p2,
            tuple(a for a, _ in self.join),
            tuple(b for _, b in self.join),
        )


def parse_rules(text: str) -> list[RuleEntry]:
    """Rules with ``@join`` become ``Rule``; the others ``SimplifiedRule``."""
    drafts: list[_RuleDraft] = []
    section: list[TriplePattern] | None = None

    for lineno, tokens in _lines(text):
        directive = _directive(tokens, lineno)
        draft = drafts[-1] if drafts else None
        if directive is not None:
            if directive == "@rule":
                name = _header_id(tokens, lineno)
                if any(d.name == name for d in drafts):
                    raise ParseError(f"duplicate rule name {name!r}", lineno)
                drafts.append(_RuleDraft(name, lineno))
                section = None
                continue
            if draft is None:
                raise ParseError(f"{directive} outside a @rule block", lineno)
            if directive == "@antecedent":
                draft.antecedent = section = []
            elif directive == "@consequent":
                draft.consequent = section = []
            elif directive == "@join":
                draft.join = [_join_pair(t, lineno) for t in tokens[1:]]
                section = None
            else:
                raise ParseError(f"unknown directive {directive}", lineno)
            continue
        if section is None:
            raise ParseError("triple pattern outside @antecedent/@consequent", lineno)
        section.append(_triple_pattern(tokens, lineno))

    rules = [d.build() for d in drafts]
    logger.debug("parsed %d rules", len(rules))
    return rules


# ---------------------------------------------------------------------------
# Transactions
# ---------------------------------------------------------------------------

def parse_transactions(text: str) -> TransactionDB:
    transactions = []
    for lineno, tokens in _lines(text):
        if tokens[0].is_directive:
            raise ParseError(f"unexpected directive {tokens[0].text}", lineno)
        items = [t.text for t in tokens]
        if items == [EMPTY_TRANSACTION]:
            items = []
        transactions.append(itemset(items))
    return TransactionDB(tuple(transactions))


def serialize_transactions(db: TransactionDB) -> str:
    lines = [" ".join(sorted(t)) if t else EMPTY_TRANSACTION for t in db]
    return "".join(line + "\n" for line in lines)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

def format_term(term: Term) -> str:
    if term.is_literal:
        inner = term.label[1:-1].replace("\\", "\\\\").replace('"', '\\"')
        return f'"{inner}"'
    label = term.label
    if not label or label[0] in '?#"' or any(c.isspace() for c in label):
        raise ValueError(f"label {label!r} has no textual form")
    return label


def format_node(node: Node) -> str:
    if isinstance(node, Variable):
        return str(node)
    return format_term(node)


def serialize_graph(g: Graph) -> str:
    return "".join(" ".join(format_term(t) for t in triple) + "\n" for triple in g.sorted_triples())


def serialize_pattern(p: Pattern) -> str:
    return "".join(" ".join(format_node(x) for x in tp) + "\n" for tp in p.sorted_triple_patterns())


def serialize_rule(entry: RuleEntry) -> str:
    consequent = entry.p2pp if isinstance(entry, SimplifiedRule) else entry.p2
    text = f"@rule {entry.name}\n@antecedent\n{serialize_pattern(entry.p1)}@consequent\n{serialize_pattern(consequent)}"
    if isinstance(entry, Rule):
        pairs = " ".join(f"{a}={b}" for a, b in zip(entry.v1, entry.v2))
        text += f"@join {pairs}\n"
    return text


def format_mapping(mu: Mapping) -> str:
    return " ".join(f"{var}={format_term(term)}" for var, term in mu)


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------

FILE_ENCODING = "utf-8"
FILE_ERRORS = "surrogateescape"


def _read(path: str | Path) -> str:
    with open(path, encoding=FILE_ENCODING, errors=FILE_ERRORS) as f:
        return f.read()


def load_graph(path: str | Path) -> Graph:
    return parse_graph(_read(path))


def load_graph_bag(path: str | Path) -> GraphBag:
    return parse_graph_bag(_read(path))


def load_pattern(path: str | Path) -> Pattern:
    return parse_pattern(_read(path))


def load_pattern_bag(path: str | Path) -> list[tuple[str, Pattern]]:
    return parse_pattern_bag(_read(path))


def load_rules(path: str | Path) -> list[RuleEntry]:
    return parse_rules(_read(path))


def load_transactions(path: str | Path) -> TransactionDB:
    return parse_transactions(_read(path))


def fixture_path(name: str) -> Path:
    """Path of a bundled fixture file."""
    return FIXTURES_DIR / name
