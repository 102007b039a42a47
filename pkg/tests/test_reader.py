import pytest
from hypothesis import given, settings, strategies as st

from conftest import FIXTURES, g
from pegrecover.grammar import (
    And, AnyChar, CharClass, Choice, Empty, Grammar, Labeled, Literal, NonTerminal, Not,
    Optional, Plus, Sequence, Star, Throw, map_desugar,
)
from pegrecover.reader import (
    GrammarSource, GrammarSyntaxError, pretty_print, read_grammar, validate,
)


def kinds(grammar):
    return sorted((e.kind, e.rule) for e in validate(grammar).errors)


def test_simple_rule():
    grammar = g("S <- 'a' S / 'b'")
    assert list(grammar.rules) == ["S"]
    assert grammar.rules["S"] == Choice(Sequence(Literal("a"), NonTerminal("S")), Literal("b"))
    assert grammar.syntactical == ["S"]


def test_label_sugar():
    grammar = g("S <- [ 'a' ]^errA")
    assert grammar.rules["S"] == Labeled(Literal("a"), "errA")
    assert grammar.labels == {"errA"}


def test_toyjava_shape(toyjava):
    assert len(toyjava.syntactical) == 13
    assert toyjava.start == "prog"
    assert all(name.isupper() for name in toyjava.lexical)
    assert validate(toyjava).ok


def test_all_fixtures_validate():
    for path in sorted(FIXTURES.glob("*.peg")):
        assert validate(read_grammar(GrammarSource.from_path(path))).ok, path.name


def test_char_class_only_in_lexical_rules():
    lexical = g("ID <- [a-z_] [a-z0-9]*")
    assert lexical.rules["ID"] == Sequence(CharClass((("a", "z"), ("_", "_"))),
                                           Star(CharClass((("a", "z"), ("0", "9")))))
    with pytest.raises(GrammarSyntaxError):
        g("S <- .")


def test_negated_class_and_escapes():
    grammar = g(r"STR <- '\'' [^'\n]* '\''")
    body = grammar.rules["STR"]
    assert body.left == Literal("'")
    assert body.right.left.inner == CharClass((("'", "'"), ("\n", "\n")), True)


def test_comments_and_recovery_rules():
    grammar = g("-- header\nS <- [A]^e -- trailing\nA <- 'a'\nrecover e <- (!A .)*\n")
    assert grammar.recovery["e"] == Star(Sequence(Not(NonTerminal("A")), AnyChar()))


def test_recovery_origin_tag():
    grammar = g("S <- [A]^e\nA <- 'a'\nrecover e : unique <- ''\n")
    assert grammar.origin("e").value == "unique"


def test_syntax_error_position():
    with pytest.raises(GrammarSyntaxError) as info:
        g("S <- 'a'\nT <- ( 'b'\n")
    assert info.value.line == 3 or info.value.line == 2


def test_left_recursion_direct():
    assert ("left-recursive", "E") in kinds(g("E <- E '+' n / n\nn <- 'x'"))


def test_left_recursion_indirect():
    found = kinds(g("A <- B\nB <- A 'x'"))
    assert ("left-recursive", "A") in found and ("left-recursive", "B") in found


def test_left_recursion_through_nullable_prefix():
    assert ("left-recursive", "A") in kinds(g("A <- 'x'? A 'y' / 'z'"))


def test_not_left_recursive_after_consumption():
    assert validate(g("A <- 'x' A / 'y'")).ok


def test_undefined_duplicate_and_reserved():
    found = kinds(g("S <- T\nS <- 'a'\nU <- [ 'b' ]^fail"))
    assert ("undefined-nonterminal", "S") in found
    assert ("duplicate-rule", "S") in found
    assert ("reserved-fail", "U") in found


def test_recovery_for_unknown_label():
    assert ("bad-label", "recover ghost") in kinds(g("S <- 'a'\nrecover ghost <- ''"))


def test_nullable_repetition_rejected():
    assert ("nullable-repetition", "S") in kinds(g("S <- ('a'?)*"))


def test_pretty_print_simple():
    assert pretty_print(g("S <- 'a'")) == "S <- 'a'\n"


def test_pretty_print_labels_and_recovery():
    text = pretty_print(g("S <- [A]^e\nA <- 'a'\nrecover e <- (!A .)*"))
    assert "[ A ]^e" in text
    assert "recover e <- (!A .)*" in text


def test_round_trip_fixtures():
    for path in sorted(FIXTURES.glob("*.peg")):
        grammar = read_grammar(GrammarSource.from_path(path))
        assert read_grammar(pretty_print(grammar)) == grammar, path.name


# random round trips

NAMES = st.sampled_from(["a1", "b_", "S", "expr"])
TOKENS = st.sampled_from(["NUM", "ID"])
LABELS = st.sampled_from(["err", "l2"])
TEXT = st.text(alphabet="ab'\\\n]-^", min_size=1, max_size=3)


def syntactic(depth):
    leaf = st.one_of(
        TEXT.map(Literal), NAMES.map(NonTerminal), TOKENS.map(NonTerminal),
        LABELS.map(Throw), st.just(Empty()),
    )
    if depth == 0:
        return leaf
    sub = syntactic(depth - 1)
    return st.one_of(
        leaf,
        st.tuples(sub, sub).map(lambda t: Sequence(*t)),
        st.tuples(sub, sub).map(lambda t: Choice(*t)),
        sub.map(Star), sub.map(Plus), sub.map(Optional), sub.map(Not), sub.map(And),
        st.tuples(sub, LABELS).map(lambda t: Labeled(*t)),
    )


CLASSES = st.lists(st.tuples(st.sampled_from("a0-]^\\"), st.sampled_from("z9-]^\\")), min_size=1,
                   max_size=2).map(lambda rs: tuple((lo, hi) if lo <= hi else (hi, lo) for lo, hi in rs))


def lexical(depth):
    leaf = st.one_of(TEXT.map(Literal), st.just(AnyChar()),
                     st.tuples(CLASSES, st.booleans()).map(lambda t: CharClass(*t)))
    if depth == 0:
        return leaf
    sub = lexical(depth - 1)
    return st.one_of(leaf, st.tuples(sub, sub).map(lambda t: Sequence(*t)),
                     st.tuples(sub, sub).map(lambda t: Choice(*t)), sub.map(Star), sub.map(Not))


@settings(max_examples=200, deadline=None)
@given(syntactic(3), lexical(2), syntactic(2))
def test_round_trip_random(body, token, recovery):
    grammar = Grammar({"S": body, "NUM": token, "ID": Literal("x"), "a1": Empty(), "b_": Empty(),
                       "expr": Empty()}, recovery={"err": recovery})
    again = read_grammar(pretty_print(grammar))
    assert map_desugar(again) == map_desugar(grammar)
