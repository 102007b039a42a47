"""Immutable model of PEGs with labeled failures.

Expressions are small frozen dataclasses. Sequence and Choice are binary;
the reader right-folds longer source forms. ``Labeled``, ``Plus``,
``Optional`` and ``And`` are sugar that :func:`desugar` removes.

An occurrence path locates a node inside a rule body: ``0`` is the left
(or only) child and ``1`` the right child. ``Labeled`` wrappers are
transparent for paths, so a site keeps its path whether or not it carries
a label. This is what lets annotated and unlabeled grammars be compared
site by site.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from typing import Callable, Iterator, Mapping, Union

FAIL = "fail"
EAT_TOKEN = "eatToken"

Path = tuple[int, ...]


@dataclass(frozen=True, slots=True)
class Empty:
    pass


@dataclass(frozen=True, slots=True)
class Literal:
    text: str


@dataclass(frozen=True, slots=True)
class CharClass:
    """A character class such as ``[a-z_]``; only legal in lexical rules."""

    ranges: tuple[tuple[str, str], ...]
    negated: bool = False

    def matches(self, char: str) -> bool:
        inside = any(lo <= char <= hi for lo, hi in self.ranges)
        return inside != self.negated


@dataclass(frozen=True, slots=True)
class AnyChar:
    pass


@dataclass(frozen=True, slots=True)
class NonTerminal:
    name: str


@dataclass(frozen=True, slots=True)
class Sequence:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class Choice:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True, slots=True)
class Star:
    inner: "Expr"


@dataclass(frozen=True, slots=True)
class Plus:
    inner: "Expr"


@dataclass(frozen=True, slots=True)
class Optional:
    inner: "Expr"


@dataclass(frozen=True, slots=True)
class Not:
    inner: "Expr"


@dataclass(frozen=True, slots=True)
class And:
    inner: "Expr"


@dataclass(frozen=True, slots=True)
class Throw:
    label: str


@dataclass(frozen=True, slots=True)
class Labeled:
    """``[inner]^label``, which behaves as ``inner / ^label``."""

    inner: "Expr"
    label: str


Expr = Union[
    Empty, Literal, CharClass, AnyChar, NonTerminal, Sequence, Choice,
    Star, Plus, Optional, Not, And, Throw, Labeled,
]

UNARY = (Star, Plus, Optional, Not, And, Labeled)
BINARY = (Sequence, Choice)
TERMINALS = (Empty, Literal, CharClass, AnyChar, Throw)


class LabelOrigin(str, enum.Enum):
    MANUAL = "manual"
    STANDARD = "standard"
    UNIQUE = "unique"
    BANNING = "banning"
    START_RULE = "start-rule"


def is_lexical_name(name: str) -> bool:
    # single capitals (S, A, B) are the customary names of syntactical rules
    return len(name) > 1 and name.isupper()


def seq(*items: Expr) -> Expr:
    """Right-folded sequence; ``seq()`` is the empty expression."""
    if not items:
        return Empty()
    result = items[-1]
    for item in reversed(items[:-1]):
        result = Sequence(item, result)
    return result


def choice(*items: Expr) -> Expr:
    if not items:
        raise ValueError("choice needs at least one alternative")
    result = items[-1]
    for item in reversed(items[:-1]):
        result = Choice(item, result)
    return result


def flatten_sequence(e: Expr) -> list[Expr]:
    items = []
    while isinstance(e, Sequence):
        items.append(e.left)
        e = e.right
    items.append(e)
    return items


def flatten_choice(e: Expr) -> list[Expr]:
    items = []
    while isinstance(e, Choice):
        items.append(e.left)
        e = e.right
    items.append(e)
    return items


def children(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, BINARY):
        return (e.left, e.right)
    if isinstance(e, UNARY):
        return (e.inner,)
    return ()


def with_children(e: Expr, kids: tuple[Expr, ...]) -> Expr:
    if isinstance(e, BINARY):
        return type(e)(kids[0], kids[1])
    if isinstance(e, Labeled):
        return Labeled(kids[0], e.label)
    if isinstance(e, UNARY):
        return type(e)(kids[0])
    return e


def transform(e: Expr, fn: Callable[[Expr], Expr]) -> Expr:
    """Bottom-up rewrite: children first, then ``fn`` on the rebuilt node."""
    kids = children(e)
    if kids:
        e = with_children(e, tuple(transform(k, fn) for k in kids))
    return fn(e)


def walk(e: Expr, path: Path = ()) -> Iterator[tuple[Path, Expr]]:
    """Yield ``(path, node)`` in pre-order, with labels transparent for paths."""
    yield path, e
    if isinstance(e, Labeled):
        yield from walk(e.inner, path)
    elif isinstance(e, BINARY):
        yield from walk(e.left, path + (0,))
        yield from walk(e.right, path + (1,))
    elif isinstance(e, UNARY):
        yield from walk(e.inner, path + (0,))


def node_at(e: Expr, path: Path) -> Expr:
    """The unlabeled node at ``path`` (outer labels are stripped)."""
    e = strip_labels(e)
    for step in path:
        if isinstance(e, BINARY):
            e = e.left if step == 0 else e.right
        else:
            e = e.inner
        e = strip_labels(e)
    return e


def replace_at(e: Expr, path: Path, fn: Callable[[Expr], Expr]) -> Expr:
    """Rebuild ``e`` with the node at ``path`` replaced by ``fn(node)``.

    Labels wrapping the target are kept outside the replacement.
    """
    if isinstance(e, Labeled):
        return Labeled(replace_at(e.inner, path, fn), e.label)
    if not path:
        return fn(e)
    step, rest = path[0], path[1:]
    if isinstance(e, BINARY):
        if step == 0:
            return type(e)(replace_at(e.left, rest, fn), e.right)
        return type(e)(e.left, replace_at(e.right, rest, fn))
    return with_children(e, (replace_at(e.inner, rest, fn),))


def strip_labels(e: Expr) -> Expr:
    while isinstance(e, Labeled):
        e = e.inner
    return e


def erase_labels(e: Expr) -> Expr:
    """Drop ``Labeled`` wrappers; raw throws are left alone."""
    return transform(e, strip_labels)


def expand_plus(e: Expr) -> Expr:
    return transform(e, lambda n: Sequence(n.inner, Star(n.inner)) if isinstance(n, Plus) else n)


def _desugar_node(e: Expr) -> Expr:
    if isinstance(e, Labeled):
        return Choice(e.inner, Throw(e.label))
    if isinstance(e, Plus):
        return Sequence(e.inner, Star(e.inner))
    if isinstance(e, Optional):
        return Choice(e.inner, Empty())
    if isinstance(e, And):
        return Not(Not(e.inner))
    return e


def desugar(e: Expr) -> Expr:
    return transform(e, _desugar_node)


def thrown_labels(e: Expr) -> set[str]:
    found = set()
    for _, node in walk(e):
        if isinstance(node, Throw):
            found.add(node.label)
        elif isinstance(node, Labeled):
            found.add(node.label)
    return found


def referenced_names(e: Expr) -> list[str]:
    return [node.name for _, node in walk(e) if isinstance(node, NonTerminal)]


@dataclass(frozen=True)
class Grammar:
    """A labeled PEG.

    ``rules`` keeps definition order and the first rule is the start rule
    unless ``start`` says otherwise. ``recovery`` maps labels to their
    recovery expressions. ``origins`` records who introduced each label.
    """

    rules: Mapping[str, Expr]
    start: str = ""
    recovery: Mapping[str, Expr] = field(default_factory=dict)
    origins: Mapping[str, LabelOrigin] = field(default_factory=dict)
    # names defined more than once in the source; the first definition wins
    duplicates: tuple[str, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.start and self.rules:
            object.__setattr__(self, "start", next(iter(self.rules)))

    @property
    def lexical(self) -> list[str]:
        return [n for n in self.rules if is_lexical_name(n)]

    @property
    def syntactical(self) -> list[str]:
        return [n for n in self.rules if not is_lexical_name(n)]

    @property
    def labels(self) -> set[str]:
        found = set(self.recovery)
        for body in self.rules.values():
            found |= thrown_labels(body)
        for body in self.recovery.values():
            found |= thrown_labels(body)
        return found

    def origin(self, label: str) -> LabelOrigin:
        return self.origins.get(label, LabelOrigin.MANUAL)

    def is_lexical(self, name: str) -> bool:
        return is_lexical_name(name)

    def with_rules(self, rules: Mapping[str, Expr], **changes) -> "Grammar":
        return replace(self, rules=dict(rules), **changes)

    def map_rules(self, fn: Callable[[str, Expr], Expr]) -> "Grammar":
        return self.with_rules({name: fn(name, body) for name, body in self.rules.items()})


def map_desugar(g: Grammar) -> Grammar:
    return Grammar(
        {name: desugar(body) for name, body in g.rules.items()},
        g.start,
        {label: desugar(body) for label, body in g.recovery.items()},
        dict(g.origins),
    )


def erase_grammar_labels(g: Grammar) -> Grammar:
    """The unlabeled skeleton: labels, recovery rules and eatToken removed."""
    rules = {n: erase_labels(b) for n, b in g.rules.items() if n != EAT_TOKEN}
    return Grammar(rules, g.start)


def skeleton(g: Grammar) -> dict[str, Expr]:
    """Label-free, plus-expanded rule bodies used for structural comparison."""
    return {n: expand_plus(body) for n, body in erase_grammar_labels(g).rules.items()}


def is_unlabeled(g: Grammar) -> bool:
    return all(
        not isinstance(node, (Throw, Labeled))
        for body in g.rules.values()
        for _, node in walk(body)
    )


def rule_usages(g: Grammar, name: str) -> list[tuple[str, Path]]:
    """Occurrences of ``name`` in syntactical right-hand sides."""
    if name not in g.rules:
        raise KeyError(f"unknown rule {name!r}")
    found = []
    for host in g.syntactical:
        if host == EAT_TOKEN:
            continue
        for path, node in walk(g.rules[host]):
            if isinstance(node, NonTerminal) and node.name == name:
                found.append((host, path))
    return found


def label_sites(g: Grammar) -> dict[tuple[str, Path], str]:
    """Map each labeled site ``(rule, path)`` to its label.

    Paths are taken on the plus-expanded form so that grammars annotated
    after expanding ``p+`` line up with their sources.
    """
    sites = {}
    for name, body in g.rules.items():
        if name == EAT_TOKEN:
            continue
        for path, node in walk(expand_plus(body)):
            if isinstance(node, Labeled):
                sites.setdefault((name, path), node.label)
    return sites
