"""Interpreter for PEGs with labeled failures and recovery expressions.

A match either succeeds with an end offset or fails with a label and the
offset where it was raised. Ordered choice and repetition only catch the
ordinary ``fail`` label; any other label travels upward until a recovery
expression handles it or it reaches the top. Predicates run their operand
with an empty recovery map, so nothing is recovered inside them.

In syntactical context, whitespace and ``--`` comments are skipped before
each literal and each lexical non-terminal. Lexical rules see raw text.
A token that fails to match reports the offset before the skip, which
keeps error positions on the line where the token was expected.
"""

from __future__ import annotations

import bisect
import sys
from dataclasses import dataclass, field

from .grammar import (
    FAIL, And, AnyChar, CharClass, Choice, Empty, Expr, Grammar, Labeled,
    Literal, NonTerminal, Not, Optional, Plus, Sequence, Star, Throw,
    is_lexical_name,
)

_MIN_RECURSION = 20000


@dataclass(frozen=True)
class RecoveredError:
    label: str
    position: int
    skipped: tuple[int, int]


@dataclass(frozen=True)
class Success:
    end: int
    recovered_errors: tuple[RecoveredError, ...] = ()
    # farthest input offset the matcher looked at (len(text) means "the end")
    examined: int = field(default=0, compare=False)
    token_log: tuple = field(default=(), compare=False)

    ok = True


@dataclass(frozen=True)
class Failure:
    label: str
    position: int
    recovered_errors: tuple[RecoveredError, ...] = ()
    examined: int = field(default=0, compare=False)
    token_log: tuple = field(default=(), compare=False)

    ok = False


MatchOutcome = Success | Failure


@dataclass(frozen=True)
class SyntaxTree:
    kind: str  # "nonterminal", "token" or "error"
    name: str = ""
    text: str = ""
    span: tuple[int, int] = (0, 0)
    label: str = ""
    children: tuple["SyntaxTree", ...] = ()

    def to_json(self) -> dict:
        data: dict = {"kind": self.kind}
        if self.kind != "error":
            data["name"] = self.name
        if self.kind == "token":
            data["text"] = self.text
        data["span"] = list(self.span)
        if self.kind == "error":
            data["label"] = self.label
        if self.kind == "nonterminal":
            data["children"] = [c.to_json() for c in self.children]
        return data

    def nodes(self):
        yield self
        for child in self.children:
            yield from child.nodes()

    def errors(self) -> list["SyntaxTree"]:
        return [n for n in self.nodes() if n.kind == "error"]

    def tokens(self) -> list["SyntaxTree"]:
        return [n for n in self.nodes() if n.kind == "token"]


class _Fail:
    __slots__ = ("label", "pos")

    def __init__(self, label: str, pos: int):
        self.label = label
        self.pos = pos


class _Matcher:
    def __init__(self, g: Grammar, text: str, build_tree: bool):
        self.rules = g.rules
        self.text = text
        self.size = len(text)
        self.build = build_tree
        self.quiet = 0
        self.children: list[SyntaxTree] = []
        self.errors: list[RecoveredError] = []
        self.tokens: list[tuple[str, int, int]] = []
        self.examined = 0
        self.dispatch = {
            Empty: self.empty, Literal: self.literal, CharClass: self.char_class,
            AnyChar: self.any_char, NonTerminal: self.nonterminal,
            Sequence: self.sequence, Choice: self.choice, Star: self.star,
            Plus: self.plus, Optional: self.optional, Not: self.not_,
            And: self.and_, Throw: self.throw, Labeled: self.labeled,
        }

    def run(self, e: Expr, pos: int, lexical: bool, recovery) -> "int | _Fail":
        return self.dispatch[type(e)](e, pos, lexical, recovery)

    def skip(self, pos: int) -> int:
        text, size = self.text, self.size
        while pos < size:
            c = text[pos]
            if c in " \t\r\n\f":
                pos += 1
            elif c == "-" and text.startswith("--", pos):
                end = text.find("\n", pos)
                pos = size if end < 0 else end + 1
            else:
                break
        if pos > self.examined:
            self.examined = pos
        return pos

    def note_append(self, node: SyntaxTree):
        if self.build and not self.quiet:
            self.children.append(node)

    def rollback(self, children: int, errors: int):
        del self.children[children:]
        del self.errors[errors:]

    # terminals

    def empty(self, e, pos, lexical, recovery):
        return pos

    def literal(self, e: Literal, pos, lexical, recovery):
        start = pos if lexical else self.skip(pos)
        lit = e.text
        if self.text.startswith(lit, start):
            end = start + len(lit)
            if end - 1 > self.examined:
                self.examined = end - 1
            if not lexical and lit:
                self.tokens.append((repr(lit), start, end))
            return end
        k = 0
        text, size = self.text, self.size
        while start + k < size and text[start + k] == lit[k]:
            k += 1
        if start + k > self.examined:
            self.examined = start + k
        return _Fail(FAIL, pos)

    def char_class(self, e: CharClass, pos, lexical, recovery):
        start = pos if lexical else self.skip(pos)
        if start > self.examined:
            self.examined = start
        if start < self.size and e.matches(self.text[start]):
            return start + 1
        return _Fail(FAIL, pos)

    def any_char(self, e, pos, lexical, recovery):
        start = pos if lexical else self.skip(pos)
        if start > self.examined:
            self.examined = start
        if start < self.size:
            return start + 1
        return _Fail(FAIL, pos)

    # rules

    def nonterminal(self, e: NonTerminal, pos, lexical, recovery):
        body = self.rules[e.name]
        if is_lexical_name(e.name):
            if lexical:
                return self.run(body, pos, True, recovery)
            start = self.skip(pos)
            r = self.run(body, start, True, recovery)
            if type(r) is _Fail:
                return _Fail(FAIL, pos) if r.label == FAIL else r
            self.tokens.append((e.name, start, r))
            self.note_append(SyntaxTree("token", e.name, self.text[start:r], (start, r)))
            return r
        if not self.build or self.quiet:
            return self.run(body, pos, False, recovery)
        parent = self.children
        self.children = []
        r = self.run(body, pos, False, recovery)
        kids, self.children = self.children, parent
        if type(r) is not _Fail:
            begin = kids[0].span[0] if kids else pos
            parent.append(SyntaxTree("nonterminal", e.name, span=(begin, r), children=tuple(kids)))
        return r

    # combinators

    def sequence(self, e: Sequence, pos, lexical, recovery):
        r = self.run(e.left, pos, lexical, recovery)
        if type(r) is _Fail:
            return r
        return self.run(e.right, r, lexical, recovery)

    def choice(self, e: Choice, pos, lexical, recovery):
        children, errors = len(self.children), len(self.errors)
        r = self.run(e.left, pos, lexical, recovery)
        if type(r) is not _Fail or r.label != FAIL:
            return r
        self.rollback(children, errors)
        return self.run(e.right, pos, lexical, recovery)

    def star(self, e, pos, lexical, recovery):
        inner = e.inner
        while True:
            children, errors = len(self.children), len(self.errors)
            r = self.run(inner, pos, lexical, recovery)
            if type(r) is _Fail:
                if r.label != FAIL:
                    return r
                self.rollback(children, errors)
                return pos
            if r == pos:
                # a body that consumes nothing would repeat forever
                return pos
            pos = r

    def plus(self, e: Plus, pos, lexical, recovery):
        r = self.run(e.inner, pos, lexical, recovery)
        if type(r) is _Fail:
            return r
        return self.star(e, r, lexical, recovery)

    def optional(self, e: Optional, pos, lexical, recovery):
        children, errors = len(self.children), len(self.errors)
        r = self.run(e.inner, pos, lexical, recovery)
        if type(r) is not _Fail or r.label != FAIL:
            return r
        self.rollback(children, errors)
        return pos

    def _predicate(self, inner, pos, lexical) -> bool:
        children, errors = len(self.children), len(self.errors)
        self.quiet += 1
        try:
            r = self.run(inner, pos, lexical, {})
        finally:
            self.quiet -= 1
        self.rollback(children, errors)
        return type(r) is not _Fail

    def not_(self, e: Not, pos, lexical, recovery):
        if self._predicate(e.inner, pos, lexical):
            return _Fail(FAIL, pos)
        return pos

    def and_(self, e: And, pos, lexical, recovery):
        if self._predicate(e.inner, pos, lexical):
            return pos
        return _Fail(FAIL, pos)

    def throw(self, e: Throw, pos, lexical, recovery):
        return self.raise_label(e.label, pos, recovery)

    def labeled(self, e: Labeled, pos, lexical, recovery):
        children, errors = len(self.children), len(self.errors)
        r = self.run(e.inner, pos, lexical, recovery)
        if type(r) is not _Fail or r.label != FAIL:
            return r
        self.rollback(children, errors)
        return self.raise_label(e.label, pos, recovery)

    def raise_label(self, label: str, pos: int, recovery):
        handler = recovery.get(label)
        if handler is None:
            return _Fail(label, pos)
        self.quiet += 1
        try:
            r = self.run(handler, pos, False, recovery)
        finally:
            self.quiet -= 1
        if type(r) is _Fail:
            return r
        self.errors.append(RecoveredError(label, pos, (pos, r)))
        self.note_append(SyntaxTree("error", span=(pos, r), label=label))
        return r


def _ensure_recursion_limit():
    if sys.getrecursionlimit() < _MIN_RECURSION:
        sys.setrecursionlimit(_MIN_RECURSION)


# deep grammars recurse once per expression node; raise the limit up front
_ensure_recursion_limit()


def _outcome(m: _Matcher, r) -> MatchOutcome:
    errors, tokens = tuple(m.errors), tuple(m.tokens)
    if type(r) is _Fail:
        return Failure(r.label, r.pos, errors, m.examined, tokens)
    return Success(r, errors, m.examined, tokens)


def match(g: Grammar, e: Expr | None, text: str, pos: int = 0,
          recovery=None, lexical: bool = False) -> MatchOutcome:
    """Match ``e`` (the start rule when None) against ``text`` at ``pos``.

    ``recovery`` defaults to the grammar's own recovery map; pass ``{}``
    to disable recovery.
    """
    _ensure_recursion_limit()
    if e is None:
        e = NonTerminal(g.start)
    if recovery is None:
        recovery = g.recovery
    m = _Matcher(g, text, build_tree=False)
    return _outcome(m, m.run(e, pos, lexical, recovery))


# trees and error reports

@dataclass(frozen=True)
class ErrorReport:
    file: str
    line: int
    column: int
    label: str
    message: str
    position: int = 0

    def to_json(self) -> dict:
        return {"file": self.file, "line": self.line, "column": self.column,
                "label": self.label, "message": self.message, "position": self.position}


def format_error(r: ErrorReport, column: bool = False) -> str:
    where = f"{r.file}:{r.line}:{r.column}" if column else f"{r.file}:{r.line}"
    return f"{where}: syntax error, {r.message}"


class LineMap:
    def __init__(self, text: str):
        self.starts = [0] + [i + 1 for i, c in enumerate(text) if c == "\n"]

    def locate(self, offset: int) -> tuple[int, int]:
        line = bisect.bisect_right(self.starts, offset)
        return line, offset - self.starts[line - 1] + 1


def default_message(label: str) -> str:
    return f"[{label}]"


@dataclass(frozen=True)
class ParseResult:
    tree: SyntaxTree | None
    errors: list[ErrorReport]
    outcome: MatchOutcome

    def __iter__(self):
        return iter((self.tree, self.errors))


def parse_to_tree(g: Grammar, text: str, filename: str = "<input>",
                  recovery: bool = True, messages=None) -> ParseResult:
    """Parse from the start rule and build a syntax tree on success."""
    _ensure_recursion_limit()
    messages = messages or {}
    m = _Matcher(g, text, build_tree=True)
    r = m.run(NonTerminal(g.start), 0, False, g.recovery if recovery else {})
    outcome = _outcome(m, r)
    lines = LineMap(text)

    def report(label: str, pos: int) -> ErrorReport:
        line, col = lines.locate(pos)
        return ErrorReport(filename, line, col, label, messages.get(label, default_message(label)), pos)

    errors = [report(err.label, err.position) for err in outcome.recovered_errors]
    if not outcome.ok:
        return ParseResult(None, errors + [report(outcome.label, outcome.position)], outcome)
    root = m.children[0] if m.children else SyntaxTree("nonterminal", g.start, span=(0, r))
    return ParseResult(root, errors, outcome)
