"""Static analyses over token-level views of a grammar.

Lexical non-terminals and literals written in syntactical rules are the
tokens. Every analysis here treats a token as an atomic, non-empty symbol,
so ``EOF <- !.`` counts as a token that cannot be skipped.

Occurrence paths reported by :func:`compute_uniqueness` refer to rule
bodies with ``p+`` expanded to ``p p*``, which is also the form the
annotator works on.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass, field

from .grammar import (
    EAT_TOKEN, And, AnyChar, CharClass, Choice, Empty, Expr, Grammar, Labeled,
    Literal, NonTerminal, Not, Optional, Path, Plus, Sequence, Star, Throw,
    expand_plus, is_lexical_name, node_at, rule_usages, walk,
)


@dataclass(frozen=True, order=True)
class Token:
    """A token identity: a lexical rule name, a literal, or a marker."""

    kind: str  # "lexical", "literal", "any", "end" or "begin"
    text: str

    def __str__(self) -> str:
        if self.kind == "literal":
            return repr(self.text)
        return self.text


END = Token("end", "$eof")
BEGIN = Token("begin", "$bof")
ANY = Token("any", ".")


@dataclass(frozen=True)
class TokenSet:
    tokens: frozenset = frozenset()
    has_epsilon: bool = False

    @classmethod
    def of(cls, *tokens: Token, epsilon: bool = False) -> "TokenSet":
        return cls(frozenset(tokens), epsilon)

    def __or__(self, other: "TokenSet") -> "TokenSet":
        return TokenSet(self.tokens | other.tokens, self.has_epsilon or other.has_epsilon)

    def __contains__(self, token: Token) -> bool:
        return token in self.tokens

    def __iter__(self):
        return iter(sorted(self.tokens))

    def __len__(self) -> int:
        return len(self.tokens)

    def without_epsilon(self) -> "TokenSet":
        return TokenSet(self.tokens, False)

    def isdisjoint(self, other: "TokenSet") -> bool:
        return self.tokens.isdisjoint(other.tokens)

    def names(self) -> list[str]:
        return [str(t) for t in self]


EPSILON = TokenSet(frozenset(), True)
NOTHING = TokenSet()


def token_of(e: Expr) -> Token | None:
    """The token an expression stands for in a syntactical rule, if any."""
    if isinstance(e, NonTerminal) and is_lexical_name(e.name):
        return Token("lexical", e.name)
    if isinstance(e, Literal) and e.text:
        return Token("literal", e.text)
    return None


class GrammarAnalysis:
    """FIRST, FOLLOW, LAST and PRECEDE tables for one grammar, computed once."""

    def __init__(self, g: Grammar):
        self.grammar = g
        self.rules = {
            name: expand_plus(body)
            for name, body in g.rules.items()
            if not is_lexical_name(name) and name != EAT_TOKEN
        }
        self._first = {name: NOTHING for name in self.rules}
        self._last = {name: NOTHING for name in self.rules}
        changed = True
        while changed:
            changed = False
            for name, body in self.rules.items():
                first, last = self.first(body), self.last(body)
                if first != self._first[name] or last != self._last[name]:
                    self._first[name] = self._first[name] | first
                    self._last[name] = self._last[name] | last
                    changed = True
        self._follow = self._compute_follow()
        self._precede, self.preceding = self._compute_precede()

    # FIRST and nullability

    def first(self, e: Expr) -> TokenSet:
        token = token_of(e)
        if token is not None:
            return TokenSet.of(token)
        if isinstance(e, Empty) or (isinstance(e, Literal) and not e.text):
            return EPSILON
        if isinstance(e, NonTerminal):
            return self._first.get(e.name, NOTHING)
        if isinstance(e, Sequence):
            left = self.first(e.left)
            if not left.has_epsilon:
                return left
            return left.without_epsilon() | self.first(e.right)
        if isinstance(e, Choice):
            return self.first(e.left) | self.first(e.right)
        if isinstance(e, (Star, Optional)):
            return self.first(e.inner) | EPSILON
        if isinstance(e, (Plus, Labeled)):
            return self.first(e.inner)
        if isinstance(e, (Not, And)):
            return EPSILON
        if isinstance(e, Throw):
            return NOTHING
        if isinstance(e, (AnyChar, CharClass)):
            return TokenSet.of(ANY)
        raise TypeError(e)

    def nullable(self, e: Expr) -> bool:
        return self.first(e).has_epsilon

    def last(self, e: Expr) -> TokenSet:
        """Tokens that can end a match of ``e``; epsilon when it can be empty."""
        if isinstance(e, NonTerminal) and not is_lexical_name(e.name):
            return self._last.get(e.name, NOTHING)
        if isinstance(e, Sequence):
            right = self.last(e.right)
            if not right.has_epsilon:
                return right
            return right.without_epsilon() | self.last(e.left)
        if isinstance(e, Choice):
            return self.last(e.left) | self.last(e.right)
        if isinstance(e, (Star, Optional)):
            return self.last(e.inner) | EPSILON
        if isinstance(e, (Plus, Labeled)):
            return self.last(e.inner)
        return self.first(e)

    def calck(self, p: Expr, flw: TokenSet) -> TokenSet:
        first = self.first(p)
        if first.has_epsilon:
            return first.without_epsilon() | flw
        return first

    # FOLLOW

    def follow(self, name: str) -> TokenSet:
        if name not in self.grammar.rules:
            raise KeyError(f"unknown rule {name!r}")
        return self._follow.get(name, NOTHING)

    def _compute_follow(self) -> dict[str, TokenSet]:
        follow = {name: NOTHING for name in self.rules}
        if self.grammar.start in follow:
            follow[self.grammar.start] = TokenSet.of(END)

        def visit(e: Expr, flw: TokenSet):
            if isinstance(e, NonTerminal):
                if e.name in follow:
                    follow[e.name] = follow[e.name] | flw.without_epsilon()
            elif isinstance(e, Sequence):
                visit(e.left, self.calck(e.right, flw))
                visit(e.right, flw)
            elif isinstance(e, Choice):
                visit(e.left, flw)
                visit(e.right, flw)
            elif isinstance(e, (Star, Plus)):
                visit(e.inner, self.first(e.inner).without_epsilon() | flw)
            elif isinstance(e, (Optional, Labeled)):
                visit(e.inner, flw)
            # predicates consume nothing and contribute nothing

        changed = True
        while changed:
            before = dict(follow)
            for name, body in self.rules.items():
                visit(body, follow[name])
            changed = before != follow
        return follow

    # PRECEDE: tokens that may come immediately before a rule or occurrence

    def _compute_precede(self):
        precede = {name: NOTHING for name in self.rules}
        if self.grammar.start in precede:
            precede[self.grammar.start] = TokenSet.of(BEGIN)
        occurrences: dict[tuple[str, Path], TokenSet] = {}

        def visit(rule: str, e: Expr, path: Path, prev: TokenSet) -> TokenSet:
            token = token_of(e)
            if token is not None:
                key = (rule, path)
                occurrences[key] = occurrences.get(key, NOTHING) | prev
                return TokenSet.of(token)
            if isinstance(e, NonTerminal):
                if e.name in precede:
                    precede[e.name] = precede[e.name] | prev
                    last = self._last[e.name]
                    return last.without_epsilon() | (prev if last.has_epsilon else NOTHING)
                return prev
            if isinstance(e, Sequence):
                middle = visit(rule, e.left, path + (0,), prev)
                return visit(rule, e.right, path + (1,), middle)
            if isinstance(e, Choice):
                return visit(rule, e.left, path + (0,), prev) | visit(rule, e.right, path + (1,), prev)
            if isinstance(e, (Star, Plus)):
                seen = prev
                while True:
                    out = visit(rule, e.inner, path + (0,), seen)
                    if (seen | out) == seen:
                        break
                    seen = seen | out
                return seen if isinstance(e, Star) else out
            if isinstance(e, Optional):
                return prev | visit(rule, e.inner, path + (0,), prev)
            if isinstance(e, Labeled):
                return visit(rule, e.inner, path, prev)
            if isinstance(e, (Not, And)):
                visit(rule, e.inner, path + (0,), prev)
                return prev
            return prev

        changed = True
        while changed:
            before = (dict(precede), dict(occurrences))
            for name, body in self.rules.items():
                visit(name, body, (), precede[name])
            changed = before != (precede, occurrences)
        return precede, occurrences

    def precede(self, name: str) -> TokenSet:
        return self._precede.get(name, NOTHING)


_cache: dict[int, tuple[weakref.ref, GrammarAnalysis]] = {}


def analyze(g: Grammar) -> GrammarAnalysis:
    """The analysis bundle for ``g``, shared between calls."""
    entry = _cache.get(id(g))
    if entry is not None and entry[0]() is g:
        return entry[1]
    bundle = GrammarAnalysis(g)
    key, cache = id(g), _cache
    cache[key] = (weakref.ref(g, lambda _: cache.pop(key, None)), bundle)
    return bundle


def nullable(e: Expr, g: Grammar) -> bool:
    return analyze(g).nullable(e)


def first(e: Expr, g: Grammar) -> TokenSet:
    return analyze(g).first(e)


def follow(name: str, g: Grammar) -> TokenSet:
    return analyze(g).follow(name)


def calck(p: Expr, flw: TokenSet, g: Grammar) -> TokenSet:
    return analyze(g).calck(p, flw)


# uniqueness

@dataclass(frozen=True)
class UniquenessInfo:
    unique_lexical: frozenset = frozenset()
    unique_syntactical: frozenset = frozenset()
    unique_occurrences: frozenset = frozenset()
    preceding_tokens: dict = field(default_factory=dict, compare=False)

    def is_unique_at(self, name: str, rule: str | None, path: Path) -> bool:
        return name in self.unique_lexical or (rule, path) in self.unique_occurrences


def match_uni(p: Expr, info: UniquenessInfo, rule: str | None = None, path: Path = ()) -> bool:
    """Does every successful match of ``p`` consume a unique token?"""
    if isinstance(p, NonTerminal):
        return is_lexical_name(p.name) and info.is_unique_at(p.name, rule, path)
    if isinstance(p, Sequence):
        return match_uni(p.left, info, rule, path + (0,)) or match_uni(p.right, info, rule, path + (1,))
    if isinstance(p, Choice):
        return match_uni(p.left, info, rule, path + (0,)) and match_uni(p.right, info, rule, path + (1,))
    if isinstance(p, Plus):
        return match_uni(p.inner, info, rule, path + (0,))
    if isinstance(p, Labeled):
        return match_uni(p.inner, info, rule, path)
    return False


def _lexical_occurrences(bundle: GrammarAnalysis) -> dict[str, list[tuple[str, Path]]]:
    found: dict[str, list[tuple[str, Path]]] = {}
    for rule, body in bundle.rules.items():
        for path, node in walk(body):
            if isinstance(node, NonTerminal) and is_lexical_name(node.name):
                found.setdefault(node.name, []).append((rule, path))
    return found


def _left_of_common_choice(body: Expr, earlier: Path, later: Path) -> bool:
    """Is ``earlier`` in the left alternative of a choice whose right holds ``later``?"""
    common = 0
    while common < min(len(earlier), len(later)) and earlier[common] == later[common]:
        common += 1
    if common >= min(len(earlier), len(later)):
        return False
    fork = node_at(body, earlier[:common])
    return isinstance(fork, Choice) and earlier[common] == 0 and later[common] == 1


def after_unique_usages(g: Grammar, info: UniquenessInfo) -> dict[str, list[bool]]:
    """For each syntactical rule, whether each usage sits on a unique path.

    The traversal mirrors the unique annotation algorithm: sequences turn
    the flag on after a unique token, the first alternative of a choice and
    a repetition body keep it only when they are disjoint from what follows,
    and predicates clear it.
    """
    bundle = analyze(g)
    usages: dict[str, list[bool]] = {name: [] for name in bundle.rules}
    if g.start in usages:
        usages[g.start].append(True)

    def visit(rule: str, e: Expr, path: Path, after: bool, flw: TokenSet):
        if isinstance(e, NonTerminal):
            if e.name in usages:
                usages[e.name].append(after)
        elif isinstance(e, Sequence):
            visit(rule, e.left, path + (0,), after, bundle.calck(e.right, flw))
            visit(rule, e.right, path + (1,), after or match_uni(e.left, info, rule, path + (0,)), flw)
        elif isinstance(e, Choice):
            disjoint = bundle.first(e.left).isdisjoint(bundle.calck(e.right, flw))
            visit(rule, e.left, path + (0,), after and disjoint, flw)
            visit(rule, e.right, path + (1,), after, flw)
        elif isinstance(e, Star):
            inner_first = bundle.first(e.inner)
            disjoint = inner_first.isdisjoint(flw)
            visit(rule, e.inner, path + (0,), after and disjoint, inner_first.without_epsilon() | flw)
        elif isinstance(e, Optional):
            disjoint = bundle.first(e.inner).isdisjoint(flw)
            visit(rule, e.inner, path + (0,), after and disjoint, flw)
        elif isinstance(e, Labeled):
            visit(rule, e.inner, path, after, flw)
        elif isinstance(e, (Not, And)):
            visit(rule, e.inner, path + (0,), False, NOTHING)

    for name, body in bundle.rules.items():
        visit(name, body, (), name in info.unique_syntactical, bundle.follow(name))
    return usages


def compute_uniqueness(g: Grammar) -> UniquenessInfo:
    bundle = analyze(g)
    occurrences = _lexical_occurrences(bundle)
    preceding = bundle.preceding

    unique_lexical = frozenset(name for name, occ in occurrences.items() if len(occ) == 1)

    special = set()
    for name, occ in occurrences.items():
        if len(occ) < 2:
            continue
        context = {key: preceding.get(key, NOTHING) for key in occ}
        for key in occ:
            clashes = [other for other in occ if other != key and not context[other].isdisjoint(context[key])]
            if not clashes:
                special.add(key)  # unique context
                continue
            rule, path = key
            # same right-hand side: the last of several clashing usages,
            # each of them in an earlier alternative of an enclosing choice
            if all(
                other[0] == rule and _left_of_common_choice(bundle.rules[rule], other[1], path)
                for other in clashes
            ):
                special.add(key)
    unique_occurrences = frozenset(special) | frozenset(
        occ[0] for name, occ in occurrences.items() if name in unique_lexical
    )

    # greatest fixpoint: start with every reachable syntactical rule marked
    # unique and drop those with a usage off the unique path
    candidates = {
        name for name in bundle.rules
        if name == g.start or any(host != EAT_TOKEN for host, _ in rule_usages(g, name))
    }
    while True:
        info = UniquenessInfo(unique_lexical, frozenset(candidates), unique_occurrences, preceding)
        usages = after_unique_usages(g, info)
        keep = {name for name in candidates if usages[name] and all(usages[name])}
        if keep == candidates:
            return info
        candidates = keep


# banning

@dataclass(frozen=True)
class BanSet:
    banned: frozenset = frozenset()
    # rule that triggered each ban, for reports
    reasons: dict = field(default_factory=dict, compare=False)

    def __contains__(self, name: str) -> bool:
        return name in self.banned


def _syntactical_names(e: Expr) -> set[str]:
    return {n.name for _, n in walk(e) if isinstance(n, NonTerminal) and not is_lexical_name(n.name)}


def ban_set(g: Grammar) -> BanSet:
    bundle = analyze(g)
    reasons: dict[str, str] = {}

    def ban(e: Expr, why: str):
        for name in _syntactical_names(e):
            reasons.setdefault(name, why)

    def visit(rule: str, e: Expr, flw: TokenSet):
        if isinstance(e, Sequence):
            visit(rule, e.left, bundle.calck(e.right, flw))
            visit(rule, e.right, flw)
        elif isinstance(e, Choice):
            if bundle.first(e.left).isdisjoint(bundle.calck(e.right, flw)):
                visit(rule, e.left, flw)
            else:
                ban(e.left, f"non-disjoint choice in {rule}")
            visit(rule, e.right, flw)
        elif isinstance(e, (Star, Optional)):
            inner_first = bundle.first(e.inner)
            if inner_first.isdisjoint(flw):
                inner_flw = inner_first.without_epsilon() | flw if isinstance(e, Star) else flw
                visit(rule, e.inner, inner_flw)
            else:
                ban(e.inner, f"non-disjoint repetition in {rule}")
        elif isinstance(e, Labeled):
            visit(rule, e.inner, flw)

    for name, body in bundle.rules.items():
        visit(name, body, bundle.follow(name))

    stack = list(reasons)
    while stack:
        name = stack.pop()
        for other in _syntactical_names(bundle.rules.get(name, Empty())):
            if other not in reasons:
                reasons[other] = f"reachable from banned {name}"
                stack.append(other)
    return BanSet(frozenset(reasons), reasons)


# unique token prefix

@dataclass
class PrefixReport:
    violations: list[tuple[str, tuple[str, str]]] = field(default_factory=list)
    warnings: list[tuple[str, str, str]] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def token_rules(g: Grammar) -> list[str]:
    """Lexical rules referenced from syntactical rules, in definition order."""
    used = set()
    for name, body in g.rules.items():
        if not is_lexical_name(name) and name != EAT_TOKEN:
            used |= {n.name for _, n in walk(body) if isinstance(n, NonTerminal)}
    return [name for name in g.rules if is_lexical_name(name) and name in used]


def _first_chars(e: Expr, g: Grammar, active: frozenset) -> set[str] | None:
    """Characters a lexical expression can start with; None when unbounded."""
    if isinstance(e, Literal):
        return {e.text[0]} if e.text else set()
    if isinstance(e, CharClass):
        if e.negated or sum(ord(hi) - ord(lo) + 1 for lo, hi in e.ranges) > 512:
            return None
        return {chr(c) for lo, hi in e.ranges for c in range(ord(lo), ord(hi) + 1)}
    if isinstance(e, AnyChar):
        return None
    if isinstance(e, NonTerminal):
        if e.name in active or e.name not in g.rules:
            return set()
        return _first_chars(g.rules[e.name], g, active | {e.name})
    if isinstance(e, Sequence):
        left = _first_chars(e.left, g, active)
        if left is None:
            return None
        if _maybe_empty(e.left, g):
            right = _first_chars(e.right, g, active)
            return None if right is None else left | right
        return left
    if isinstance(e, Choice):
        left, right = _first_chars(e.left, g, active), _first_chars(e.right, g, active)
        return None if left is None or right is None else left | right
    if isinstance(e, (Star, Plus, Optional, Labeled)):
        return _first_chars(e.inner, g, active)
    return set()


def _maybe_empty(e: Expr, g: Grammar) -> bool:
    from .reader import char_nullable, char_nullable_rules
    return char_nullable(e, g, char_nullable_rules(g))


def unique_token_prefix_report(g: Grammar, token_corpus) -> PrefixReport:
    """Check the unique token prefix property empirically over a corpus.

    For each string, at most one token rule may match a prefix of it.
    Warnings list token rules that share a possible first character, which
    is where predicates are usually needed.
    """
    from .engine import match

    report = PrefixReport()
    tokens = token_rules(g)
    for text in token_corpus:
        matched = [name for name in tokens if match(g, NonTerminal(name), text, lexical=True).ok]
        for i, a in enumerate(matched):
            for b in matched[i + 1:]:
                report.violations.append((text, (a, b)))
    starts = {name: _first_chars(g.rules[name], g, frozenset({name})) for name in tokens}
    for i, a in enumerate(tokens):
        for b in tokens[i + 1:]:
            if starts[a] is None or starts[b] is None:
                continue
            shared = starts[a] & starts[b]
            if shared:
                report.warnings.append((a, b, "".join(sorted(shared))))
    return report
