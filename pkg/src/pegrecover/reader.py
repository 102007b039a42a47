"""Reading, validating and printing the ``.peg`` grammar format.

The format, in its own notation::

  Grammar    <- (Definition / Recovery)*
  Definition <- Name '<-' Expression
  Recovery   <- 'recover' Name (':' Origin)? '<-' Expression
  Expression <- Sequence ('/' Sequence)*
  Sequence   <- Prefix*
  Prefix     <- ('!' / '&')? Suffix
  Suffix     <- Primary ('*' / '+' / '?')*
  Primary    <- '(' Expression ')' / '[' Expression ']^' Name / '^' Name
              / Literal / Class / '.' / Name

``--`` starts a comment that runs to the end of the line. Rule names in
uppercase are lexical; everything else is syntactical. Inside lexical
rules ``[...]`` is a character class. Everywhere else it is the label
sugar ``[ e ]^label``. Classes and ``.`` may appear only in lexical rules,
recovery rules and ``eatToken``. ``''`` is the empty expression.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from .grammar import (
    EAT_TOKEN, FAIL, And, AnyChar, CharClass, Choice, Empty, Expr, Grammar,
    LabelOrigin, Labeled, Literal, NonTerminal, Not, Optional, Plus,
    Sequence, Star, Throw, is_lexical_name, walk,
)


class GrammarSyntaxError(Exception):
    def __init__(self, message: str, origin: str, line: int, column: int):
        super().__init__(f"{origin}:{line}:{column}: {message}")
        self.message = message
        self.origin = origin
        self.line = line
        self.column = column


@dataclass(frozen=True)
class GrammarSource:
    text: str
    origin: str = "<memory>"

    @classmethod
    def from_path(cls, path) -> "GrammarSource":
        path = Path(path)
        return cls(path.read_text(encoding="utf-8"), str(path))


_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", "'": "'", '"': '"',
            "[": "[", "]": "]", "-": "-", "^": "^"}


def _is_name_start(c: str) -> bool:
    return c.isalpha() or c == "_"


def _is_name_char(c: str) -> bool:
    return c.isalnum() or c == "_"


class _Reader:
    def __init__(self, src: GrammarSource):
        self.text = src.text
        self.origin = src.origin
        self.pos = 0
        # kind of the rule being read: "lexical", "syntactical" or "free"
        self.context = "syntactical"

    def error(self, message: str, pos: int | None = None):
        pos = self.pos if pos is None else pos
        line = self.text.count("\n", 0, pos) + 1
        column = pos - (self.text.rfind("\n", 0, pos) + 1) + 1
        raise GrammarSyntaxError(message, self.origin, line, column)

    def skip(self):
        text = self.text
        while self.pos < len(text):
            c = text[self.pos]
            if c in " \t\r\n":
                self.pos += 1
            elif text.startswith("--", self.pos):
                end = text.find("\n", self.pos)
                self.pos = len(text) if end < 0 else end + 1
            else:
                break

    def peek(self, s: str) -> bool:
        self.skip()
        return self.text.startswith(s, self.pos)

    def accept(self, s: str) -> bool:
        if self.peek(s):
            self.pos += len(s)
            return True
        return False

    def expect(self, s: str):
        if not self.accept(s):
            self.error(f"expected {s!r}")

    def name_at(self, pos: int) -> tuple[str, int] | None:
        text = self.text
        if pos < len(text) and _is_name_start(text[pos]):
            end = pos + 1
            while end < len(text) and _is_name_char(text[end]):
                end += 1
            return text[pos:end], end
        return None

    def name(self) -> str:
        self.skip()
        found = self.name_at(self.pos)
        if found is None:
            self.error("expected a name")
        self.pos = found[1]
        return found[0]

    def _after_space(self, pos: int) -> int:
        saved = self.pos
        self.pos = pos
        self.skip()
        pos, self.pos = self.pos, saved
        return pos

    def at_definition(self) -> bool:
        """True when the upcoming text starts a new rule or recovery rule."""
        self.skip()
        found = self.name_at(self.pos)
        if found is None:
            return False
        word, end = found
        after = self._after_space(end)
        if self.text.startswith("<-", after):
            return True
        if word == "recover":
            second = self.name_at(after)
            if second is not None:
                after = self._after_space(second[1])
                return self.text.startswith("<-", after) or self.text.startswith(":", after)
        return False

    # grammar level

    def grammar(self) -> Grammar:
        rules: dict[str, Expr] = {}
        recovery: dict[str, Expr] = {}
        origins: dict[str, LabelOrigin] = {}
        duplicates = []
        self.skip()
        while self.pos < len(self.text):
            if not self.at_definition():
                self.error("expected a rule definition")
            start = self.pos
            word = self.name()
            if word == "recover" and not self.peek("<-"):
                label = self.name()
                if self.accept(":"):
                    origin_pos = self.pos
                    origin = self.origin_name()
                    try:
                        origins[label] = LabelOrigin(origin)
                    except ValueError:
                        self.error(f"unknown label origin {origin!r}", origin_pos)
                self.expect("<-")
                self.context = "free"
                body = self.expression()
                if label in recovery:
                    self.error(f"recovery rule for {label!r} defined twice", start)
                recovery[label] = body
            else:
                self.expect("<-")
                if is_lexical_name(word):
                    self.context = "lexical"
                elif word == EAT_TOKEN:
                    self.context = "free"
                else:
                    self.context = "syntactical"
                body = self.expression()
                if word in rules:
                    duplicates.append(word)
                else:
                    rules[word] = body
            self.skip()
        if not rules:
            self.error("grammar has no rules")
        return Grammar(rules, recovery=recovery, origins=origins, duplicates=tuple(duplicates))

    def origin_name(self) -> str:
        self.skip()
        end = self.pos
        while end < len(self.text) and (_is_name_char(self.text[end]) or self.text[end] == "-"):
            end += 1
        word, self.pos = self.text[self.pos:end], end
        return word

    # expressions

    def expression(self) -> Expr:
        alternatives = [self.sequence()]
        while self.accept("/"):
            alternatives.append(self.sequence())
        result = alternatives[-1]
        for alt in reversed(alternatives[:-1]):
            result = Choice(alt, result)
        return result

    def sequence(self) -> Expr:
        items = []
        while self.starts_prefix():
            items.append(self.prefix())
        if not items:
            self.error("expected an expression")
        result = items[-1]
        for item in reversed(items[:-1]):
            result = Sequence(item, result)
        return result

    def starts_prefix(self) -> bool:
        self.skip()
        if self.pos >= len(self.text):
            return False
        c = self.text[self.pos]
        if c in "!&(['\"^.":
            return True
        if _is_name_start(c):
            return not self.at_definition()
        return False

    def prefix(self) -> Expr:
        if self.accept("!"):
            return Not(self.prefix())
        if self.accept("&"):
            return And(self.prefix())
        return self.suffix()

    def suffix(self) -> Expr:
        e = self.primary()
        while True:
            if self.accept("*"):
                e = Star(e)
            elif self.accept("+"):
                e = Plus(e)
            elif self.accept("?"):
                e = Optional(e)
            else:
                return e

    def primary(self) -> Expr:
        self.skip()
        start = self.pos
        c = self.text[self.pos]
        if c == "(":
            self.pos += 1
            e = self.expression()
            self.expect(")")
            return e
        if c == "[":
            if self.context == "lexical":
                return self.char_class()
            self.pos += 1
            e = self.expression()
            self.expect("]")
            if not self.text.startswith("^", self.pos):
                self.error("expected '^label' after ']'")
            self.pos += 1
            return Labeled(e, self.label_name())
        if c == "^":
            self.pos += 1
            return Throw(self.label_name())
        if c == "'" or c == '"':
            text = self.literal()
            return Literal(text) if text else Empty()
        if c == ".":
            if self.context == "syntactical":
                self.error("'.' is only allowed in lexical rules", start)
            self.pos += 1
            return AnyChar()
        return NonTerminal(self.name())

    def label_name(self) -> str:
        found = self.name_at(self.pos)
        if found is None:
            self.error("expected a label name")
        self.pos = found[1]
        return found[0]

    def escape(self) -> str:
        text = self.text
        self.pos += 1
        if self.pos >= len(text):
            self.error("unfinished escape")
        c = text[self.pos]
        if c in _ESCAPES:
            self.pos += 1
            return _ESCAPES[c]
        if c in "xu":
            width = 2 if c == "x" else 4
            digits = text[self.pos + 1:self.pos + 1 + width]
            try:
                value = chr(int(digits, 16))
            except ValueError:
                self.error("bad numeric escape")
            self.pos += 1 + width
            return value
        self.error(f"unknown escape '\\{c}'")

    def literal(self) -> str:
        quote = self.text[self.pos]
        start = self.pos
        self.pos += 1
        out = []
        while True:
            if self.pos >= len(self.text):
                self.error("unterminated literal", start)
            c = self.text[self.pos]
            if c == quote:
                self.pos += 1
                return "".join(out)
            if c == "\\":
                out.append(self.escape())
            else:
                out.append(c)
                self.pos += 1

    def class_char(self) -> str:
        if self.text[self.pos] == "\\":
            return self.escape()
        c = self.text[self.pos]
        self.pos += 1
        return c

    def char_class(self) -> Expr:
        start = self.pos
        self.pos += 1
        negated = self.text.startswith("^", self.pos)
        if negated:
            self.pos += 1
        ranges = []
        while True:
            if self.pos >= len(self.text):
                self.error("unterminated character class", start)
            if self.text[self.pos] == "]":
                self.pos += 1
                break
            lo = self.class_char()
            hi = lo
            if self.text.startswith("-", self.pos) and not self.text.startswith("-]", self.pos):
                self.pos += 1
                hi = self.class_char()
            ranges.append((lo, hi))
        return CharClass(tuple(ranges), negated)


def read_grammar(src: GrammarSource | str) -> Grammar:
    if isinstance(src, str):
        src = GrammarSource(src)
    return _Reader(src).grammar()


def read_grammar_file(path) -> Grammar:
    return read_grammar(GrammarSource.from_path(path))


# validation

@dataclass(frozen=True)
class ValidationError:
    kind: str
    rule: str
    detail: str


@dataclass
class ValidationReport:
    errors: list[ValidationError] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


def char_nullable_rules(g: Grammar) -> dict[str, bool]:
    """Character-level nullability of every rule, by fixpoint."""
    table = {name: False for name in g.rules}
    changed = True
    while changed:
        changed = False
        for name, body in g.rules.items():
            if not table[name] and char_nullable(body, g, table):
                table[name] = True
                changed = True
    return table


def char_nullable(e: Expr, g: Grammar, table: dict[str, bool]) -> bool:
    """Can ``e`` succeed without consuming a character?

    A throw counts as nullable when its recovery rule is, since the
    recovered outcome is then a success at the same position.
    """
    if isinstance(e, Empty):
        return True
    if isinstance(e, Literal):
        return e.text == ""
    if isinstance(e, (CharClass, AnyChar)):
        return False
    if isinstance(e, NonTerminal):
        return table.get(e.name, False)
    if isinstance(e, Sequence):
        return char_nullable(e.left, g, table) and char_nullable(e.right, g, table)
    if isinstance(e, Choice):
        return char_nullable(e.left, g, table) or char_nullable(e.right, g, table)
    if isinstance(e, (Star, Optional, Not, And)):
        return True
    if isinstance(e, Plus):
        return char_nullable(e.inner, g, table)
    if isinstance(e, Throw):
        return e.label in g.recovery and char_nullable(g.recovery[e.label], g, table)
    if isinstance(e, Labeled):
        return char_nullable(e.inner, g, table) or char_nullable(Throw(e.label), g, table)
    raise TypeError(e)


def _left_calls(e: Expr, g: Grammar, table: dict[str, bool], seen_labels: frozenset) -> set[str]:
    """Rules that ``e`` may invoke before consuming any input."""
    if isinstance(e, NonTerminal):
        return {e.name}
    if isinstance(e, Sequence):
        found = _left_calls(e.left, g, table, seen_labels)
        if char_nullable(e.left, g, table):
            found |= _left_calls(e.right, g, table, seen_labels)
        return found
    if isinstance(e, Choice):
        return _left_calls(e.left, g, table, seen_labels) | _left_calls(e.right, g, table, seen_labels)
    if isinstance(e, Labeled):
        return _left_calls(e.inner, g, table, seen_labels) | _left_calls(Throw(e.label), g, table, seen_labels)
    if isinstance(e, (Star, Plus, Optional, Not, And)):
        return _left_calls(e.inner, g, table, seen_labels)
    if isinstance(e, Throw) and e.label in g.recovery and e.label not in seen_labels:
        return _left_calls(g.recovery[e.label], g, table, seen_labels | {e.label})
    return set()


def validate(g: Grammar) -> ValidationReport:
    report = ValidationReport()
    add = report.errors.append

    for name in g.duplicates:
        add(ValidationError("duplicate-rule", name, f"rule {name!r} is defined more than once"))

    bodies = [(name, body) for name, body in g.rules.items()]
    bodies += [(f"recover {label}", body) for label, body in g.recovery.items()]

    for host, body in bodies:
        for name in sorted({n.name for _, n in walk(body) if isinstance(n, NonTerminal)}):
            if name not in g.rules:
                add(ValidationError("undefined-nonterminal", host, f"{name!r} is not defined"))

    for label in sorted(g.labels):
        if label == FAIL:
            add(ValidationError("reserved-fail", _thrower(g, label), "'fail' cannot be used as a label"))
    thrown = set()
    for body in list(g.rules.values()) + list(g.recovery.values()):
        thrown |= {n.label for _, n in walk(body) if isinstance(n, (Throw, Labeled))}
    for label in g.recovery:
        if label not in thrown and label != FAIL:
            add(ValidationError("bad-label", f"recover {label}", f"label {label!r} is never thrown"))
    if EAT_TOKEN in g.rules and is_lexical_name(EAT_TOKEN):
        add(ValidationError("bad-label", EAT_TOKEN, "eatToken is reserved"))

    table = char_nullable_rules(g)
    for host, body in bodies:
        for _, node in walk(body):
            if isinstance(node, (Star, Plus)) and char_nullable(node.inner, g, table):
                add(ValidationError("nullable-repetition", host,
                                    "repetition body can succeed without consuming input"))

    calls = {name: _left_calls(body, g, table, frozenset()) for name, body in g.rules.items()}
    for name in g.rules:
        seen, stack = set(), list(calls[name])
        while stack:
            other = stack.pop()
            if other in seen or other not in calls:
                continue
            seen.add(other)
            stack.extend(calls[other])
        if name in seen:
            add(ValidationError("left-recursive", name, f"{name!r} can call itself without consuming input"))
    return report


def _thrower(g: Grammar, label: str) -> str:
    for name, body in g.rules.items():
        if any(isinstance(n, (Throw, Labeled)) and n.label == label for _, n in walk(body)):
            return name
    return f"recover {label}"


# printing

_LITERAL_ESCAPES = {"\\": "\\\\", "'": "\\'", "\n": "\\n", "\t": "\\t", "\r": "\\r"}
_CLASS_ESCAPES = {"\\": "\\\\", "]": "\\]", "-": "\\-", "^": "\\^", "[": "\\[",
                  "\n": "\\n", "\t": "\\t", "\r": "\\r"}


def _escape(text: str, table: dict[str, str]) -> str:
    out = []
    for c in text:
        if c in table:
            out.append(table[c])
        elif not c.isprintable():
            out.append(f"\\u{ord(c):04x}")
        else:
            out.append(c)
    return "".join(out)


def _print(e: Expr, lexical: bool, level: int = 0) -> str:
    """Print with parentheses where ``level`` demands them.

    Levels: 0 choice, 1 sequence, 2 prefix, 3 suffix/primary.
    """
    if isinstance(e, Choice):
        text = f"{_print(e.left, lexical, 1)} / {_print(e.right, lexical, 0)}"
        return text if level == 0 else f"({text})"
    if isinstance(e, Sequence):
        text = f"{_print(e.left, lexical, 2)} {_print(e.right, lexical, 1)}"
        return text if level <= 1 else f"({text})"
    if isinstance(e, (Not, And)):
        op = "!" if isinstance(e, Not) else "&"
        text = op + _print(e.inner, lexical, 2)
        return text if level <= 2 else f"({text})"
    if isinstance(e, (Star, Plus, Optional)):
        op = {Star: "*", Plus: "+", Optional: "?"}[type(e)]
        return _print(e.inner, lexical, 3) + op
    if isinstance(e, Labeled):
        if lexical:
            return _print(Choice(e.inner, Throw(e.label)), lexical, level)
        return f"[ {_print(e.inner, lexical, 0)} ]^{e.label}"
    if isinstance(e, Throw):
        return f"^{e.label}"
    if isinstance(e, Empty):
        return "''"
    if isinstance(e, Literal):
        return "'" + _escape(e.text, _LITERAL_ESCAPES) + "'"
    if isinstance(e, AnyChar):
        return "."
    if isinstance(e, CharClass):
        parts = []
        for lo, hi in e.ranges:
            lo_text = _escape(lo, _CLASS_ESCAPES)
            parts.append(lo_text if lo == hi else f"{lo_text}-{_escape(hi, _CLASS_ESCAPES)}")
        return "[" + ("^" if e.negated else "") + "".join(parts) + "]"
    if isinstance(e, NonTerminal):
        return e.name
    raise TypeError(e)


def print_expression(e: Expr, lexical: bool = False) -> str:
    return _print(e, lexical)


def pretty_print(g: Grammar) -> str:
    lines = []
    width = max((len(name) for name in g.rules), default=0)
    for name, body in g.rules.items():
        lines.append(f"{name.ljust(width)} <- {_print(body, is_lexical_name(name))}")
    if g.recovery:
        lines.append("")
        for label, body in g.recovery.items():
            origin = g.origin(label)
            tag = "" if origin is LabelOrigin.MANUAL else f" : {origin.value}"
            lines.append(f"recover {label}{tag} <- {_print(body, False)}")
    return "\n".join(lines) + "\n"
