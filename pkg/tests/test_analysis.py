import pytest
from hypothesis import given, settings, strategies as st

from conftest import g, load
from oracles import oracle
from pegrecover.analysis import (
    Token, TokenSet, analyze, ban_set, calck, compute_uniqueness, first, follow, match_uni,
    nullable, unique_token_prefix_report,
)
from pegrecover.grammar import (
    Choice, Empty, Grammar, Literal, NonTerminal, Not, Optional, Plus, Sequence, Star, Throw,
    expand_plus, node_at, rule_usages,
)

FIXTURE_GRAMMARS = ["toyjava", "titan", "pascal", "cifelse"]


def tok(name):
    return Token("lexical", name)


def names(ts):
    return set(ts.names())


# frozen from tests/oracles.py over the toy Java grammar
TOYJAVA_FIRST = {
    "prog": {"PUBLIC"},
    "blockStmt": {"LCUR"},
    "stmt": {"IF", "INT", "LCUR", "NAME", "PRINTLN", "WHILE"},
    "exp": {"LPAR", "NAME", "NUMBER"},
    "atomExp": {"LPAR", "NAME", "NUMBER"},
}
STMT_FOLLOW = {"ELSE", "IF", "INT", "LCUR", "NAME", "PRINTLN", "RCUR", "WHILE"}
TOYJAVA_FOLLOW = {
    "prog": {"$eof"},
    "stmt": STMT_FOLLOW,
    "ifStmt": STMT_FOLLOW,
    "exp": {"RPAR", "SEMI"},
    "relExp": {"EQ", "RPAR", "SEMI"},
    "mulExp": {"EQ", "LT", "MINUS", "PLUS", "RPAR", "SEMI"},
    "atomExp": {"DIV", "EQ", "LT", "MINUS", "PLUS", "RPAR", "SEMI", "TIMES"},
}


def test_nullable_basics(toyjava):
    assert nullable(Star(Literal("a")), toyjava)
    assert not nullable(Literal("a"), toyjava)
    assert nullable(Not(Literal("a")), toyjava)
    assert not nullable(Throw("l"), toyjava)
    assert not nullable(toyjava.rules["stmt"], toyjava)


def test_first_frozen(toyjava):
    for rule, expected in TOYJAVA_FIRST.items():
        assert names(first(NonTerminal(rule), toyjava)) == expected, rule


def test_first_of_optional_choice(toyjava):
    result = first(Choice(Literal("a"), Empty()), toyjava)
    assert names(result) == {"'a'"} and result.has_epsilon


def test_first_of_throw_is_empty(toyjava):
    assert first(Throw("l"), toyjava) == TokenSet()


def test_follow_frozen(toyjava):
    for rule, expected in TOYJAVA_FOLLOW.items():
        assert names(follow(rule, toyjava)) == expected, rule
    assert {"RCUR", "ELSE"} <= names(follow("stmt", toyjava))
    assert "EQ" in names(follow("relExp", toyjava))


def test_follow_unknown_rule(toyjava):
    with pytest.raises(KeyError):
        follow("nope", toyjava)


@pytest.mark.parametrize("name", FIXTURE_GRAMMARS)
def test_matches_cfg_oracle(name):
    grammar = load(name)
    first_sets, follow_sets = oracle(grammar)
    bundle = analyze(grammar)
    for rule in grammar.syntactical:
        got = bundle.first(bundle.rules[rule])
        assert names(got) | ({"<eps>"} if got.has_epsilon else set()) == first_sets[rule], rule
        assert names(bundle.follow(rule)) == follow_sets[rule], rule


def test_calck_examples(toyjava):
    flw = TokenSet.of(Token("literal", "b"))
    assert names(calck(Optional(Literal("a")), flw, toyjava)) == {"'a'", "'b'"}
    assert names(calck(Literal("a"), flw, toyjava)) == {"'a'"}


def test_dangling_else_is_not_disjoint(toyjava):
    else_branch = toyjava.rules["ifStmt"].right.right.right.right.right
    assert isinstance(else_branch, Choice)
    assert tok("ELSE") in calck(else_branch.right, follow("ifStmt", toyjava), toyjava)
    assert not first(else_branch.left, toyjava).isdisjoint(follow("ifStmt", toyjava))


# uniqueness

def test_toyjava_unique_tokens(toyjava):
    info = compute_uniqueness(toyjava)
    assert "WHILE" in info.unique_lexical
    assert "LPAR" not in info.unique_lexical
    assert len(rule_usages(toyjava, "LPAR")) == 5


def test_unique_lexical_used_once():
    for name in FIXTURE_GRAMMARS:
        grammar = load(name)
        for token in compute_uniqueness(grammar).unique_lexical:
            assert len(rule_usages(grammar, token)) == 1, (name, token)


def test_titan_import_context():
    grammar = load("titan")
    info = compute_uniqueness(grammar)
    assert "FOREIGN" in info.unique_lexical
    assert "IMPORT" not in info.unique_lexical
    import_sites = [(r, p) for r, p in info.unique_occurrences
                    if node_at(expand_plus(grammar.rules[r]), p) == NonTerminal("IMPORT")]
    assert sorted(r for r, _ in import_sites) == ["foreign", "import"]
    before = {r: names(info.preceding_tokens[(r, p)]) for r, p in import_sites}
    assert before == {"import": {"ASSIGN"}, "foreign": {"FOREIGN"}}


def test_titan_unique_syntactical():
    assert compute_uniqueness(load("titan")).unique_syntactical == {"foreign", "program", "toplevelrecord"}


def test_cifelse_second_if_unique():
    grammar = load("cifelse")
    info = compute_uniqueness(grammar)
    assert "ELSE" in info.unique_lexical
    body = expand_plus(grammar.rules["stat"])
    ifs = [p for r, p in info.unique_occurrences if r == "stat" and node_at(body, p) == NonTerminal("IF")]
    assert ifs == [(1, 0, 0)]
    assert info.is_unique_at("IF", "stat", (1, 0, 0))
    assert not info.is_unique_at("IF", "stat", (0, 0))


def test_occurrences_are_nonterminals():
    for name in FIXTURE_GRAMMARS:
        grammar = load(name)
        info = compute_uniqueness(grammar)
        for rule, path in info.unique_occurrences:
            assert isinstance(node_at(expand_plus(grammar.rules[rule]), path), NonTerminal)


def test_match_uni(toyjava):
    info = compute_uniqueness(toyjava)
    WHILE, NAME, LPAR = NonTerminal("WHILE"), NonTerminal("NAME"), NonTerminal("LPAR")
    assert match_uni(Sequence(WHILE, LPAR), info)
    assert not match_uni(Choice(WHILE, NAME), info)
    assert match_uni(Choice(WHILE, NonTerminal("IF")), info)
    assert match_uni(Plus(WHILE), info)
    assert not match_uni(Star(WHILE), info)
    assert not match_uni(Optional(WHILE), info)


# banning

def test_pascal_ban():
    bans = ban_set(load("pascal"))
    assert {"newOrdinalType", "enumType", "subrangeType", "const"} <= bans.banned
    assert "ordinalType" not in bans.banned


def test_disjoint_grammar_bans_nothing():
    assert ban_set(g("S <- A / B\nA <- 'a' C\nB <- 'b'\nC <- 'c'")).banned == set()


def test_start_rule_conflict_bans_most():
    grammar = g("S <- A 'x' / A 'y'\nA <- B C\nB <- 'b' C\nC <- 'c'")
    assert ban_set(grammar).banned == {"A", "B", "C"}


def assert_ban_closed(grammar):
    banned = ban_set(grammar).banned
    for rule in banned:
        for node in _nonterminals(grammar.rules[rule]):
            if node in grammar.syntactical:
                assert node in banned, (rule, node)


def _nonterminals(e):
    from pegrecover.grammar import walk
    return {n.name for _, n in walk(e) if isinstance(n, NonTerminal)}


@pytest.mark.parametrize("name", FIXTURE_GRAMMARS)
def test_ban_closure_fixtures(name):
    assert_ban_closed(load(name))


# token prefixes

def test_prefix_report_predicates_help():
    grammar = g("S <- ASSIGN / EQ\nASSIGN <- '=' !'='\nEQ <- '=='")
    assert unique_token_prefix_report(grammar, ["==", "= x"]).violations == []


def test_prefix_report_violation():
    report = unique_token_prefix_report(g("S <- AA / AB\nAA <- 'a'\nAB <- 'ab'"), ["ab"])
    assert report.violations == [("ab", ("AA", "AB"))]
    assert not report.ok


def test_prefix_report_empty_corpus():
    assert unique_token_prefix_report(load("toyjava"), []).violations == []


def test_prefix_report_warns_on_shared_first_char():
    report = unique_token_prefix_report(g("S <- AA / AB\nAA <- 'a'\nAB <- 'ab'"), [])
    assert report.warnings == [("AA", "AB", "a")]


# random grammars

RULES = ["S", "A", "B"]
TOKENS = ["XX", "YY", "ZZ"]


def bodies(depth):
    leaf = st.one_of(st.sampled_from(RULES + TOKENS).map(NonTerminal), st.just(Empty()),
                     st.just(Throw("l")), st.just(Literal("k")))
    if depth == 0:
        return leaf
    sub = bodies(depth - 1)
    return st.one_of(
        leaf,
        st.tuples(sub, sub).map(lambda t: Sequence(*t)),
        st.tuples(sub, sub).map(lambda t: Choice(*t)),
        sub.map(Star), sub.map(Plus), sub.map(Optional), sub.map(Not),
    )


grammars = st.lists(bodies(3), min_size=3, max_size=3).map(
    lambda bs: Grammar({**dict(zip(RULES, bs)), **{t: Literal(t.lower()) for t in TOKENS}}))


@settings(max_examples=150, deadline=None)
@given(grammars)
def test_random_grammars_match_oracle(grammar):
    first_sets, follow_sets = oracle(grammar)
    bundle = analyze(grammar)
    for rule in RULES:
        got = bundle.first(bundle.rules[rule])
        assert names(got) | ({"<eps>"} if got.has_epsilon else set()) == first_sets[rule]
        assert names(bundle.follow(rule)) == follow_sets[rule]


@settings(max_examples=150, deadline=None)
@given(grammars)
def test_fixpoint_stability(grammar):
    bundle = analyze(grammar)
    for rule in RULES:
        assert bundle.first(NonTerminal(rule)) == bundle.first(bundle.rules[rule])


@settings(max_examples=150, deadline=None)
@given(grammars)
def test_ban_closure_random(grammar):
    assert_ban_closed(grammar)


@settings(max_examples=150, deadline=None)
@given(bodies(3), st.sets(st.sampled_from(TOKENS)), st.booleans())
def test_calck_properties(p, flw_names, eps):
    grammar = Grammar({"S": Empty(), "A": Empty(), "B": Empty(), **{t: Literal(t.lower()) for t in TOKENS}})
    flw = TokenSet.of(*map(tok, flw_names), epsilon=eps)
    got = calck(p, flw, grammar)
    base = first(p, grammar)
    assert base.without_epsilon().tokens <= got.tokens
    if not nullable(p, grammar):
        assert got == base
