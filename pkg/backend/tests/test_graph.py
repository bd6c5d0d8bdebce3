"""Tests for terms, graphs, patterns, bags and the text formats."""

import pickle

import pytest

from src.data_pipeline.parsers import (
    format_mapping,
    format_term,
    load_graph,
    parse_graph,
    parse_graph_bag,
    parse_pattern,
    parse_pattern_bag,
    parse_rules,
    parse_transactions,
    serialize_graph,
    serialize_pattern,
    serialize_rule,
    serialize_transactions,
    tokenize,
)
from src.models.errors import NameClashError, ParseError
from src.models.graph import Graph, GraphBag, subgraph_contains
from src.models.mapping import Mapping
from src.models.rule import Rule, SimplifiedRule
from src.models.terms import Term, Triple, TriplePattern, Variable


# ═══════════════════════════════════════════════════════════════════════════
# Terms
# ═══════════════════════════════════════════════════════════════════════════


class TestTerms:
    def test_interning_returns_same_object(self):
        assert Term("Alice") is Term("Alice")

    def test_equality_is_by_label(self):
        assert Term("Alice") == Term("Alice")
        assert Term("Alice") != Term("Bob")
        assert hash(Term("Alice")) == hash(Term("Alice"))

    def test_pickle_preserves_identity(self):
        assert pickle.loads(pickle.dumps(Term("Alice"))) is Term("Alice")

    def test_literal_detection(self):
        assert Term('"Alice"').is_literal
        assert not Term("Alice").is_literal

    def test_variable_prints_with_question_mark(self):
        assert str(Variable("v1")) == "?v1"

    def test_variable_and_term_never_equal(self):
        assert Variable("x") != Term("x")


# ═══════════════════════════════════════════════════════════════════════════
# Graphs and patterns
# ═══════════════════════════════════════════════════════════════════════════


class TestGraph:
    def test_set_semantics(self, make_graph):
        g = make_graph(("a", "p", "b"), ("a", "p", "b"))
        assert len(g) == 1

    def test_term_set_includes_predicates(self, make_graph):
        g = make_graph(("a", "p", "b"))
        assert g.term_set == {Term("a"), Term("p"), Term("b")}

    def test_iteration_is_sorted(self, make_graph):
        g = make_graph(("b", "p", "a"), ("a", "q", "b"), ("a", "p", "c"))
        assert [t.sort_key() for t in g] == [("a", "p", "c"), ("a", "q", "b"), ("b", "p", "a")]

    def test_union_with_subset_returns_same_graph(self, make_graph):
        g = make_graph(("a", "p", "b"))
        assert g.union(g.triples) is g

    def test_index_candidates_pick_smallest_bucket(self, make_graph):
        g = make_graph(("a", "p", "b"), ("a", "p", "c"), ("d", "p", "b"))
        candidates = g.index.candidates(Term("d"), Term("p"), None)
        assert candidates == (Triple(Term("d"), Term("p"), Term("b")),)

    def test_index_candidates_unknown_term(self, make_graph):
        g = make_graph(("a", "p", "b"))
        assert g.index.candidates(Term("zzz"), None, None) == ()

    def test_subgraph_contains(self, coauthor_graph, make_graph):
        assert subgraph_contains(coauthor_graph, make_graph(("Alice", "coauthorOf", "Bob")))
        assert not subgraph_contains(coauthor_graph, make_graph(("Bob", "worksAt", "Org")))

    def test_term_set_matches_recomputation(self, gen):
        for _ in range(200):
            g = gen.graph() if gen.rng.random() < 0.5 else gen.labelled_graph()
            assert g.term_set == {x for triple in g.triples for x in triple}
            grown = g.union(gen.graph().triples)
            assert grown.term_set == {x for triple in grown.triples for x in triple}

    def test_subgraph_contains_is_a_partial_order(self, gen):
        for _ in range(200):
            g = gen.graph()
            triples = g.sorted_triples()
            h = Graph(gen.rng.sample(triples, gen.rng.randint(0, len(triples))))
            k = Graph(gen.rng.sample(h.sorted_triples(), gen.rng.randint(0, len(h))))
            other = gen.graph()
            assert subgraph_contains(g, g)
            assert subgraph_contains(g, h) and subgraph_contains(h, k) and subgraph_contains(g, k)
            for a, b, c in ((g, other, h), (other, g, k), (h, other, k)):
                if subgraph_contains(a, b) and subgraph_contains(b, c):
                    assert subgraph_contains(a, c)
            assert (subgraph_contains(g, other) and subgraph_contains(other, g)) == (g == other)
            assert subgraph_contains(h, g) == (h == g)


class TestPattern:
    def test_vars_and_terms(self, make_pattern):
        p = make_pattern(("?v1", "coauthorOf", "?v2"), ("?v1", "worksAt", "?v3"))
        assert p.variables == (Variable("v1"), Variable("v2"), Variable("v3"))
        assert p.terms == {Term("coauthorOf"), Term("worksAt")}

    def test_ground_pattern_becomes_graph(self, make_pattern, make_graph):
        p = make_pattern(("a", "p", "b"))
        assert p.is_ground
        assert p.to_graph() == make_graph(("a", "p", "b"))

    def test_open_pattern_refuses_to_graph(self, make_pattern):
        with pytest.raises(ValueError, match=r"\?x"):
            make_pattern(("?x", "p", "b")).to_graph()

    def test_variables_sort_before_terms(self):
        tp = TriplePattern(Variable("z"), Term("a"), Term("a"))
        other = TriplePattern(Term("a"), Term("a"), Term("a"))
        assert tp.sort_key() < other.sort_key()


class TestGraphBag:
    def test_generated_ids(self, make_graph):
        g = make_graph(("a", "p", "b"))
        bag = GraphBag.of(g, g)
        assert bag.ids == ("g1", "g2")
        assert len(bag) == 2

    def test_duplicate_ids_rejected(self, make_graph):
        g = make_graph(("a", "p", "b"))
        with pytest.raises(ValueError, match="duplicate"):
            GraphBag((("x", g), ("x", g)))

    def test_filter_keeps_order(self, family_bag):
        reduced = family_bag.filter(lambda gid, g: gid != "g2")
        assert reduced.ids == ("g1", "g3", "g4", "g5")


# ═══════════════════════════════════════════════════════════════════════════
# Tokenizer
# ═══════════════════════════════════════════════════════════════════════════


class TestTokenize:
    def test_whitespace_and_comments(self):
        tokens = tokenize("a   b\tc  # trailing comment")
        assert [t.text for t in tokens] == ["a", "b", "c"]

    def test_quoted_label_keeps_quotes(self):
        tokens = tokenize('t1 label "Alice Smith"')
        assert tokens[2].text == '"Alice Smith"'
        assert tokens[2].quoted

    def test_quoted_hash_is_not_a_comment(self):
        tokens = tokenize('t1 label "#1"')
        assert tokens[2].text == '"#1"'

    def test_escapes(self):
        tokens = tokenize(r't1 label "say \"hi\" \\ bye"')
        assert tokens[2].text == '"say "hi" \\ bye"'

    def test_unterminated_quote(self):
        with pytest.raises(ParseError, match="line 4"):
            tokenize('t1 label "open', 4)

    def test_directive(self):
        assert tokenize("@graph g1")[0].is_directive

    def test_at_label_is_not_a_directive(self):
        assert not tokenize("@bob knows alice")[0].is_directive
        assert not tokenize('"@graph" p o')[0].is_directive


# ═══════════════════════════════════════════════════════════════════════════
# Parsers
# ═══════════════════════════════════════════════════════════════════════════


class TestParseGraph:
    def test_blank_lines_and_comments(self):
        g = parse_graph("# header\n\nAlice knows Bob\n\nBob knows Alice  # back\n")
        assert len(g) == 2

    def test_wrong_arity(self):
        with pytest.raises(ParseError, match="line 2"):
            parse_graph("a p b\na p\n")

    def test_variable_in_graph_rejected(self):
        with pytest.raises(ParseError):
            parse_graph("?x p b\n")

    def test_at_labels_in_every_position(self):
        g = parse_graph("alice mentions @bob\n@carol @says hi\n")
        assert Triple(Term("alice"), Term("mentions"), Term("@bob")) in g
        assert Triple(Term("@carol"), Term("@says"), Term("hi")) in g

    def test_header_line_rejected(self):
        with pytest.raises(ParseError, match="unexpected directive @graph"):
            parse_graph("@graph g1\na p b\n")

    def test_nlp_sentence_fixture(self, fixture_file):
        g = load_graph(fixture_file("nlp_sentence.g"))
        assert len(g) == 34
        assert Triple(Term("t1"), Term("label"), Term('"Alice"')) in g


class TestParsePattern:
    def test_variables_and_terms(self):
        p = parse_pattern("?v1 coauthorOf ?v2\n?v1 worksAt ?v3\n")
        assert len(p.vars) == 3
        assert p.terms == {Term("coauthorOf"), Term("worksAt")}

    def test_name_clash(self):
        with pytest.raises(NameClashError):
            parse_pattern("?x p x\n")

    def test_directive_rejected(self):
        with pytest.raises(ParseError):
            parse_pattern("@graph g1\n?x p y\n")


class TestParseBags:
    def test_family_bag(self, family_bag):
        assert family_bag.ids == ("g1", "g2", "g3", "g4", "g5")
        assert all(len(g) == 5 for _, g in family_bag)

    def test_family_patterns(self, family_patterns):
        assert [pid for pid, _ in family_patterns] == ["p1", "p2", "p3", "p4", "p5"]
        assert all(p.terms == {Term("hF"), Term("hM"), Term("cob"), Term("cor")} for _, p in family_patterns)

    def test_duplicate_graph_id(self):
        with pytest.raises(ParseError, match="duplicate"):
            parse_graph_bag("@graph g\na p b\n@graph g\na p c\n")

    def test_content_before_header(self):
        with pytest.raises(ParseError, match="before the first"):
            parse_graph_bag("a p b\n@graph g\n")

    def test_at_subject_inside_a_bag(self):
        bag = parse_graph_bag("@graph g\n@bob p @carol\n")
        assert bag.ids == ("g",)
        assert Triple(Term("@bob"), Term("p"), Term("@carol")) in bag.graphs[0][1]

    def test_unknown_directive_in_a_bag(self):
        with pytest.raises(ParseError, match="unknown directive @grpah"):
            parse_graph_bag("@grpah g\na p b\n")

    def test_pattern_bag_checks_clash_per_pattern(self):
        parsed = parse_pattern_bag("@pattern p\n?x p y\n@pattern q\n?y p x\n")
        assert len(parsed) == 2
        with pytest.raises(NameClashError):
            parse_pattern_bag("@pattern p\n?x p x\n")


class TestParseRules:
    def test_join_gives_full_rule(self, coauthor_rule):
        assert isinstance(coauthor_rule, Rule)
        assert coauthor_rule.v1 == (Variable("v2"), Variable("v3"))
        assert coauthor_rule.n == 2

    def test_no_join_gives_simplified_rule(self):
        (rule,) = parse_rules("@rule t\n@antecedent\n?a p ?b\n?b p ?c\n@consequent\n?a p ?c\n")
        assert isinstance(rule, SimplifiedRule)
        assert rule.shared_variables == (Variable("a"), Variable("c"))

    def test_duplicate_rule_name(self):
        text = "@rule t\n@antecedent\n?a p ?b\n@consequent\n?a q ?b\n"
        with pytest.raises(ParseError, match="duplicate rule"):
            parse_rules(text + text)

    def test_missing_consequent(self):
        with pytest.raises(ParseError, match="@consequent"):
            parse_rules("@rule t\n@antecedent\n?a p ?b\n")

    def test_bad_join_entry(self):
        with pytest.raises(ParseError, match="join"):
            parse_rules("@rule t\n@antecedent\n?a p ?b\n@consequent\n?a q ?b\n@join a=b\n")

    def test_clash_across_rule_sides(self):
        with pytest.raises(NameClashError):
            parse_rules("@rule t\n@antecedent\n?a p ?b\n@consequent\na q ?b\n")

    def test_at_terms_in_rules(self):
        text = "@rule r\n@antecedent\n@alice mentions ?x\n@consequent\n?x knows @alice\n"
        (rule,) = parse_rules(text)
        assert rule.p1.terms == {Term("@alice"), Term("mentions")}
        assert parse_rules(serialize_rule(rule)) == [rule]

    def test_misspelt_directive(self):
        with pytest.raises(ParseError, match="line 2: unknown directive @antecednt"):
            parse_rules("@rule r\n@antecednt\n")


class TestTransactions:
    def test_dash_is_empty_transaction(self):
        db = parse_transactions("a b\n-\nc\n")
        assert len(db) == 3
        assert frozenset() in db.transactions

    def test_serialize_sorted_items(self):
        db = parse_transactions("b a\n-\n")
        assert serialize_transactions(db) == "a b\n-\n"


# ═══════════════════════════════════════════════════════════════════════════
# Serialization
# ═══════════════════════════════════════════════════════════════════════════


class TestSerialize:
    def test_graph_is_sorted_and_reparses(self, coauthor_graph):
        text = serialize_graph(coauthor_graph)
        assert text.splitlines()[0] == "Alice coauthorOf Bob"
        assert parse_graph(text) == coauthor_graph

    def test_literal_escaping(self):
        assert format_term(Term('"say "hi""')) == r'"say \"hi\""'

    def test_unrepresentable_label(self):
        with pytest.raises(ValueError):
            format_term(Term("has space"))

    def test_at_label(self):
        assert format_term(Term("@bob")) == "@bob"

    def test_graph_round_trip(self, gen):
        for _ in range(300):
            g = gen.labelled_graph() if gen.rng.random() < 0.7 else gen.graph()
            assert parse_graph(serialize_graph(g)) == g

    def test_graph_file_round_trip_keeps_raw_bytes(self, gen, tmp_path):
        path = tmp_path / "g.g"
        for _ in range(200):
            g = gen.labelled_graph()
            path.write_bytes(serialize_graph(g).encode("utf-8", "surrogateescape"))
            assert load_graph(path) == g

    def test_undecodable_byte_label(self, tmp_path):
        path = tmp_path / "bytes.g"
        path.write_bytes(b"a b \xff\xfe\n")
        (triple,) = load_graph(path)
        assert triple.o.label.encode("utf-8", "surrogateescape") == b"\xff\xfe"

    def test_pattern_variables_first(self):
        p = parse_pattern("a p ?x\n?x p a\n")
        assert serialize_pattern(p) == "?x p a\na p ?x\n"

    def test_rule_with_join(self, coauthor_rule):
        text = serialize_rule(coauthor_rule)
        assert text.startswith("@rule coauthor_org\n@antecedent\n")
        assert text.endswith("@join ?v2=?v2 ?v3=?v3\n")
        assert parse_rules(text) == [coauthor_rule]

    def test_format_mapping(self):
        mu = Mapping.from_dict({Variable("b"): Term("y"), Variable("a"): Term("x")})
        assert format_mapping(mu) == "?a=x ?b=y"
