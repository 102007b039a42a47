from hypothesis import given, settings, strategies as st

from conftest import g, load
from pegrecover.engine import match
from pegrecover.grammar import (
    And, Choice, Empty, Grammar, Labeled, Literal, NonTerminal, Not, Optional, Plus,
    Sequence, Star, Throw, desugar, erase_grammar_labels, expand_plus, is_lexical_name,
    is_unlabeled, label_sites, node_at, replace_at, rule_usages, walk,
)

A = NonTerminal("A")


def test_desugar_labeled():
    assert desugar(Labeled(A, "err")) == Choice(A, Throw("err"))


def test_desugar_plus_and_predicates():
    assert desugar(Plus(A)) == Sequence(A, Star(A))
    assert desugar(And(A)) == Not(Not(A))
    assert desugar(Optional(A)) == Choice(A, Empty())


def test_desugar_leaves_core_nodes():
    e = Sequence(Star(A), Not(Literal("x")))
    assert desugar(e) == e


def test_is_unlabeled_fixtures(toyjava, fig3):
    assert is_unlabeled(toyjava)
    assert not is_unlabeled(fig3)


def test_is_unlabeled_sees_raw_throw():
    assert not is_unlabeled(g("S <- 'a' / ^oops"))


def test_rule_usages_counts_tokens(toyjava):
    assert rule_usages(toyjava, "WHILE") == [("whileStmt", (0,))]
    hosts = sorted({host for host, _ in rule_usages(toyjava, "LPAR")})
    assert hosts == ["atomExp", "ifStmt", "printStmt", "prog", "whileStmt"]
    assert len(rule_usages(toyjava, "LPAR")) == 5


def test_rule_usages_unknown_name(toyjava):
    try:
        rule_usages(toyjava, "NOPE")
    except KeyError:
        pass
    else:
        raise AssertionError("expected KeyError")


def test_lexical_names():
    assert is_lexical_name("NAME") and is_lexical_name("EOF")
    assert not is_lexical_name("S") and not is_lexical_name("stmt") and not is_lexical_name("eatToken")


def test_paths_ignore_labels():
    plain = Sequence(A, NonTerminal("B"))
    labeled = Sequence(A, Labeled(NonTerminal("B"), "l"))
    assert [p for p, _ in walk(plain)] == [p for p, n in walk(labeled) if not isinstance(n, Labeled)]
    assert node_at(labeled, (1,)) == NonTerminal("B")


def test_replace_at_keeps_labels_outside():
    e = Sequence(A, Labeled(NonTerminal("B"), "l"))
    out = replace_at(e, (1,), lambda n: Sequence(n, Empty()))
    assert out == Sequence(A, Labeled(Sequence(NonTerminal("B"), Empty()), "l"))


def test_label_sites_use_expanded_plus():
    grammar = g("S <- 'a' [B]^l+\nB <- 'b'")
    assert label_sites(grammar) == {("S", (1, 0)): "l", ("S", (1, 1, 0)): "l"}


def test_erase_grammar_labels_drops_recovery(fig3):
    erased = erase_grammar_labels(fig3)
    assert is_unlabeled(erased) and not erased.recovery


def test_start_defaults_to_first_rule():
    grammar = Grammar({"b": Literal("x"), "a": Literal("y")})
    assert grammar.start == "b"


# sugar must agree with its expansion in the engine

TEXTS = st.text(alphabet="ab", max_size=6)


def _grammar(body):
    return Grammar({"S": body, "A": Literal("a"), "B": Literal("b")}, recovery={"l": Star(Literal("b"))})


SUGARED = [
    Labeled(NonTerminal("A"), "l"),
    Plus(NonTerminal("A")),
    Optional(NonTerminal("A")),
    And(NonTerminal("A")),
    Sequence(Labeled(Sequence(NonTerminal("A"), NonTerminal("B")), "l"), Plus(NonTerminal("B"))),
    Sequence(Optional(Labeled(NonTerminal("B"), "l")), And(Star(NonTerminal("A")))),
]


@settings(max_examples=150, deadline=None)
@given(st.sampled_from(SUGARED), TEXTS, st.booleans())
def test_sugar_equivalence(body, text, recover):
    recovery = None if recover else {}
    assert match(_grammar(body), None, text, recovery=recovery) == \
        match(_grammar(desugar(body)), None, text, recovery=recovery)


def test_expand_plus_is_idempotent():
    e = load("titan").rules["toplevelrecord"]
    assert expand_plus(expand_plus(e)) == expand_plus(e)
