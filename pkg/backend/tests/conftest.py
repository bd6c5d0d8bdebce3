"""Shared test fixtures for the gpar test suite."""

import random

import pytest

from src.data_pipeline.parsers import (
    fixture_path,
    load_graph,
    load_graph_bag,
    load_pattern_bag,
    load_rules,
    load_transactions,
)
from src.models.graph import Graph, GraphBag, Pattern
from src.models.rule import Rule, SimplifiedRule
from src.models.terms import Term, Triple, TriplePattern, Variable
from src.models.transactions import TransactionDB


def _node(label: str):
    return Variable(label[1:]) if label.startswith("?") else Term(label)


# ── Fixture Files ───────────────────────────────────────────────────────

@pytest.fixture
def fixture_file():
    """Path of a bundled fixture, e.g. ``fixture_file("coauthor.g")``."""
    return lambda name: str(fixture_path(name))


@pytest.fixture
def coauthor_graph():
    return load_graph(fixture_path("coauthor.g"))


@pytest.fixture
def coauthor_bag():
    return load_graph_bag(fixture_path("coauthor.bag"))


@pytest.fixture
def coauthor_rule():
    (rule,) = load_rules(fixture_path("coauthor.rules"))
    return rule


@pytest.fixture
def family_bag():
    return load_graph_bag(fixture_path("family.bag"))


@pytest.fixture
def family_patterns():
    return load_pattern_bag(fixture_path("family.patterns"))


@pytest.fixture
def shopping_db():
    return load_transactions(fixture_path("shopping.tx"))


@pytest.fixture
def load_rule():
    """First rule of a bundled rules file."""
    return lambda name: load_rules(fixture_path(name))[0]


# ── Factories ───────────────────────────────────────────────────────────

@pytest.fixture
def make_graph():
    """Factory fixture building a Graph from label triples.

    Usage:
        g = make_graph(("Alice", "knows", "Bob"), ("Bob", "knows", "Alice"))
    """
    def _factory(*triples):
        return Graph(Triple(*(Term(x) for x in t)) for t in triples)

    return _factory


@pytest.fixture
def make_pattern():
    """Factory fixture building a Pattern; labels starting with ``?`` are variables."""
    def _factory(*triple_patterns):
        return Pattern(TriplePattern(*(_node(x) for x in tp)) for tp in triple_patterns)

    return _factory


@pytest.fixture
def make_rule(make_pattern):
    """Factory fixture for rules.

    Without ``v1``/``v2`` the result is a SimplifiedRule; with them a full Rule.
    """
    def _factory(p1, p2, v1=None, v2=None, name="r"):
        p1 = p1 if isinstance(p1, Pattern) else make_pattern(*p1)
        p2 = p2 if isinstance(p2, Pattern) else make_pattern(*p2)
        if v1 is None and v2 is None:
            return SimplifiedRule(name, p1, p2)
        return Rule(
            name, p1, p2,
            tuple(Variable(v.lstrip("?")) for v in v1),
            tuple(Variable(v.lstrip("?")) for v in v2),
        )

    return _factory


# ── Random Instances ────────────────────────────────────────────────────

NODES = ("a", "b", "c", "d", "e", "f")
PREDICATES = ("p", "q")
# label material for text-format round trips: @ and # inside labels, quotes,
# backslashes, non-ASCII and one undecodable byte (as a surrogate escape)
LABEL_HEADS = ("a", "Zed", "t1", "\u00e9", "@", "\udcff")
LABEL_TAIL = ("b", "1", "#", '"', "?", "@", "%", "\u00e9", "\udcfe")
LITERAL_CHARS = ("a", " ", '"', "\\", "#", "@", "\u00e9", "\udcfe")


class InstanceGenerator:
    """Small random graphs, patterns, rules and transaction databases.

    Sizes are kept small enough for brute-force enumeration: at most six node
    terms plus two predicates, and at most three joined variables.
    """

    def __init__(self, seed: int) -> None:
        self.rng = random.Random(seed)

    def graph(self, max_triples: int = 8) -> Graph:
        rng = self.rng
        nodes = rng.sample(NODES, rng.randint(2, len(NODES)))
        triples = {
            Triple(Term(rng.choice(nodes)), Term(rng.choice(PREDICATES)), Term(rng.choice(nodes)))
            for _ in range(rng.randint(1, max_triples))
        }
        return Graph(triples)

    def bag(self, max_graphs: int = 3) -> GraphBag:
        return GraphBag.of(*(self.graph() for _ in range(self.rng.randint(1, max_graphs))))

    def triple_pattern(self, variables, term_chance: float = 0.1) -> TriplePattern:
        rng = self.rng

        def endpoint():
            if rng.random() < term_chance:
                return Term(rng.choice(NODES))
            return Variable(rng.choice(variables))

        predicate = Term(rng.choice(PREDICATES))
        if rng.random() < term_chance / 2:
            predicate = Variable(rng.choice(variables))
        return TriplePattern(endpoint(), predicate, endpoint())

    def pattern(self, variables=("x", "y", "z"), size: int | None = None, term_chance: float = 0.1) -> Pattern:
        size = size or self.rng.randint(1, 3)
        while True:
            pattern = Pattern(self.triple_pattern(variables, term_chance) for _ in range(size))
            if pattern.vars:
                return pattern

    def rule(self, name: str = "r") -> SimplifiedRule:
        """Simplified rule sharing one to three variables."""
        while True:
            p1 = self.pattern(("x", "y", "z"))
            p2 = self.pattern(("x", "y", "z", "w"), self.rng.randint(1, 2))
            rule = SimplifiedRule(name, p1, p2)
            if rule.n:
                return rule

    def transactions(self, items=("a", "b", "c", "d"), max_size: int = 8) -> TransactionDB:
        rng = self.rng
        return TransactionDB.of(*(
            [item for item in items if rng.random() < 0.5]
            for _ in range(rng.randint(1, max_size))
        ))

    def itemset(self, items=("a", "b", "c", "d")) -> frozenset[str]:
        return frozenset(self.rng.sample(items, self.rng.randint(1, 2)))

    def label(self) -> str:
        rng = self.rng
        if rng.random() < 0.2:
            inner = "".join(rng.choice(LITERAL_CHARS) for _ in range(rng.randint(0, 4)))
            return f'"{inner}"'
        return rng.choice(LABEL_HEADS) + "".join(rng.choice(LABEL_TAIL) for _ in range(rng.randint(0, 3)))

    def labelled_graph(self, max_triples: int = 6) -> Graph:
        """Graph over awkward labels; every one of them has a textual form."""
        labels = [self.label() for _ in range(5)]
        rng = self.rng
        return Graph(
            Triple(*(Term(rng.choice(labels)) for _ in range(3)))
            for _ in range(rng.randint(1, max_triples))
        )


@pytest.fixture
def gen():
    """Seeded instance generator; every test sees the same sequence."""
    return InstanceGenerator(seed=20240611)
