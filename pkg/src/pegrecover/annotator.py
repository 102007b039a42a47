"""Automatic insertion of error labels and recovery rules.

Two algorithms decide where ``[p]^l`` may be written without changing the
language. The standard one labels every symbol that follows a consumed
symbol in an LL(1)-looking context. The unique one additionally requires
that a unique token was already matched on the path to the site, which
guarantees that a failure there would doom the whole parse anyway.

Every new label gets a recovery rule ``(!flw eatToken)*`` that skips
tokens until something in the follow set used at insertion time shows up.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field

from .analysis import (
    GrammarAnalysis, TokenSet, UniquenessInfo, analyze, ban_set,
    compute_uniqueness, match_uni, token_of,
)
from .grammar import (
    EAT_TOKEN, AnyChar, Choice, Expr, Grammar, LabelOrigin, Labeled, Literal,
    NonTerminal, Not, Optional, Path, Sequence, Star, children, choice,
    expand_plus, flatten_sequence, is_lexical_name, is_unlabeled, rule_usages,
    skeleton, walk, with_children,
)
from .reader import char_nullable, char_nullable_rules

STRATEGIES = ("standard", "unique", "unique+banning", "banning")


class AnnotationError(Exception):
    pass


@dataclass(frozen=True)
class AnnotationConfig:
    strategy: str = "standard"
    preserve_existing: bool = False
    protect_start_rule: bool = False
    # rules left exactly as written, e.g. to compare with a hand-made reference
    exclude_rules: frozenset = frozenset()

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")


@dataclass(frozen=True)
class InsertedLabel:
    label: str
    rule: str
    path: Path
    follow: tuple[str, ...]
    origin: LabelOrigin

    def to_json(self) -> dict:
        return {"label": self.label, "rule": self.rule, "path": list(self.path),
                "follow": list(self.follow), "origin": self.origin.value}


@dataclass(frozen=True)
class SkippedSite:
    rule: str
    path: Path
    reason: str  # non-disjoint-choice, non-disjoint-repetition, not-after-unique, banned, nullable, excluded

    def to_json(self) -> dict:
        return {"rule": self.rule, "path": list(self.path), "reason": self.reason}


@dataclass
class AnnotationResult:
    grammar: Grammar
    inserted: list[InsertedLabel] = field(default_factory=list)
    skipped: list[SkippedSite] = field(default_factory=list)

    def sites(self) -> set[tuple[str, Path]]:
        return {(i.rule, i.path) for i in self.inserted}

    def to_json(self) -> dict:
        return {"inserted": [i.to_json() for i in self.inserted],
                "skipped": [s.to_json() for s in self.skipped]}


# recovery expressions

def token_expr(g: Grammar, token) -> Expr:
    return NonTerminal(token.text) if token.kind == "lexical" else Literal(token.text)


def _ordered_tokens(g: Grammar, flw: TokenSet) -> list:
    order = {name: i for i, name in enumerate(g.rules)}
    usable = [t for t in flw.tokens if t.kind in ("lexical", "literal")]
    return sorted(usable, key=lambda t: (t.kind != "lexical", order.get(t.text, 0), t.text))


def recovery_expression(g: Grammar, flw: TokenSet) -> Expr:
    """``(!flw eatToken)*``; with no usable tokens it skips to the end."""
    tokens = _ordered_tokens(g, flw)
    if not tokens:
        return Star(NonTerminal(EAT_TOKEN))
    guard = choice(*(token_expr(g, t) for t in tokens))
    return Star(Sequence(Not(guard), NonTerminal(EAT_TOKEN)))


def build_eat_token(g: Grammar) -> Expr:
    """``eatToken <- T1 / ... / Tn / .`` over the lexical rules.

    Rules that can match the empty string (``EOF <- !.``) are left out, as
    they would let a recovery loop stop making progress.
    """
    table = char_nullable_rules(g)
    tokens = [NonTerminal(n) for n in g.lexical if not char_nullable(g.rules[n], g, table)]
    return choice(*tokens, AnyChar())


# naming

class _Naming:
    """Hands out temporary labels and resolves final names at the end."""

    def __init__(self):
        self.bases: dict[str, str] = {}

    def fresh(self, rule: str, target: Expr) -> str:
        temp = f"__new{len(self.bases)}"
        self.bases[temp] = f"{rule}_{_symbol(target)}".lower()
        return temp

    def resolve(self, taken: set[str], live: set[str] | None = None) -> dict[str, str]:
        """Final names for the temporaries in ``live`` (all of them by default)."""
        bases = {t: b for t, b in self.bases.items() if live is None or t in live}
        counts = Counter(bases.values())
        used = set(taken)
        serial: Counter = Counter()
        names = {}
        for temp, base in bases.items():
            if counts[base] == 1 and base not in used:
                name = base
            else:
                while True:
                    serial[base] += 1
                    name = f"{base}_{serial[base]}"
                    if name not in used:
                        break
            used.add(name)
            names[temp] = name
        return names


def _symbol(e: Expr) -> str:
    if isinstance(e, NonTerminal):
        return e.name
    if isinstance(e, Literal):
        cleaned = re.sub(r"\W+", "", e.text)
        return cleaned or "lit"
    return "choice"


def _rename(e: Expr, names: dict[str, str]) -> Expr:
    kids = children(e)
    if kids:
        e = with_children(e, tuple(_rename(k, names) for k in kids))
    if isinstance(e, Labeled) and e.label in names:
        return Labeled(e.inner, names[e.label])
    return e


# the algorithms

class _Annotator:
    def __init__(self, g: Grammar, naming: _Naming, unique: UniquenessInfo | None,
                 origin: LabelOrigin):
        self.g = g
        self.bundle: GrammarAnalysis = analyze(g)
        self.naming = naming
        self.unique = unique
        self.origin = origin
        self.recovery: dict[str, Expr] = {}
        self.inserted: list[InsertedLabel] = []
        self.skipped: list[SkippedSite] = []
        # set while walking a part that must stay as written (preserved labels still get recovery)
        self.frozen = False

    def add_label(self, rule: str, path: Path, p: Expr, flw: TokenSet) -> Expr:
        if self.frozen:
            return p
        label = self.naming.fresh(rule, p)
        self.recovery[label] = recovery_expression(self.g, flw)
        self.inserted.append(InsertedLabel(label, rule, path, tuple(flw.names()), self.origin))
        return Labeled(p, label)

    def skip(self, rule: str, path: Path, reason: str):
        if not self.frozen:
            self.skipped.append(SkippedSite(rule, path, reason))

    def ensure_recovery(self, label: str, flw: TokenSet):
        if label not in self.g.recovery and label not in self.recovery:
            self.recovery[label] = recovery_expression(self.g, flw)

    def untouched(self, rule: str, p: Expr, path: Path, flw: TokenSet) -> Expr:
        """Leave ``p`` alone apart from recovery rules for labels already in it."""
        if not any(isinstance(n, Labeled) for _, n in walk(p)):
            return p
        frozen, self.frozen = self.frozen, True
        try:
            return self.labexp(rule, p, path, False, False, flw)
        finally:
            self.frozen = frozen

    def labexp(self, rule: str, p: Expr, path: Path, seq: bool, after: bool, flw: TokenSet) -> Expr:
        b = self.bundle
        unique = self.unique is not None
        if isinstance(p, Labeled):
            # a label that was already there: keep it, give it a recovery rule
            inner = self.labexp(rule, p.inner, path, False, after, flw)
            self.ensure_recovery(p.label, flw)
            return Labeled(inner, p.label)
        if isinstance(p, NonTerminal) or token_of(p) is not None:
            if seq:
                if b.nullable(p):
                    self.skip(rule, path, "nullable")
                elif after:
                    return self.add_label(rule, path, p, flw)
                else:
                    self.skip(rule, path, "not-after-unique")
            return p
        if isinstance(p, Sequence):
            left = self.labexp(rule, p.left, path + (0,), seq, after, b.calck(p.right, flw))
            after_left = after or (unique and match_uni(p.left, self.unique, rule, path + (0,)))
            right = self.labexp(rule, p.right, path + (1,), seq or not b.nullable(p.left), after_left, flw)
            return Sequence(left, right)
        if isinstance(p, Choice):
            disjoint = b.first(p.left).isdisjoint(b.calck(p.right, flw))
            if unique:
                left = self.labexp(rule, p.left, path + (0,), False, after and disjoint, flw)
            elif disjoint:
                left = self.labexp(rule, p.left, path + (0,), False, after, flw)
            else:
                left = self.untouched(rule, p.left, path + (0,), flw)
            if not disjoint:
                self.skip(rule, path + (0,), "non-disjoint-choice")
            right = self.labexp(rule, p.right, path + (1,), False, after, flw)
            result = Choice(left, right)
            if seq and not b.nullable(p):
                if after:
                    return self.add_label(rule, path, result, flw)
                self.skip(rule, path, "not-after-unique")
            return result
        if isinstance(p, (Star, Optional)):
            inner_first = b.first(p.inner)
            disjoint = inner_first.isdisjoint(flw)
            kind = "non-disjoint-repetition" if isinstance(p, Star) else "non-disjoint-choice"
            if not disjoint:
                self.skip(rule, path + (0,), kind)
            inner_flw = inner_first.without_epsilon() | flw if isinstance(p, Star) else flw
            if unique:
                inner = self.labexp(rule, p.inner, path + (0,), False, after and disjoint, inner_flw)
            elif disjoint:
                inner = self.labexp(rule, p.inner, path + (0,), False, after, inner_flw)
            else:
                inner = self.untouched(rule, p.inner, path + (0,), inner_flw)
            return type(p)(inner)
        return p


def _ensure_annotatable(g: Grammar, cfg: AnnotationConfig):
    if not cfg.preserve_existing and not is_unlabeled(g):
        raise AnnotationError("grammar already has labels; use preserve_existing to keep them")


def _run(g: Grammar, cfg: AnnotationConfig, naming: _Naming, mode: str) -> tuple[Grammar, _Annotator]:
    """One pass of labexp over the syntactical rules.

    ``mode`` is "standard", "unique" or "banning".
    """
    unique = compute_uniqueness(g) if mode == "unique" else None
    banned = ban_set(g) if mode == "banning" else None
    origin = {"standard": LabelOrigin.STANDARD, "unique": LabelOrigin.UNIQUE,
              "banning": LabelOrigin.BANNING}[mode]
    worker = _Annotator(g, naming, unique, origin)
    rules = {}
    for name, body in g.rules.items():
        if is_lexical_name(name) or name == EAT_TOKEN:
            rules[name] = body
            continue
        if name in cfg.exclude_rules:
            worker.skip(name, (), "excluded")
            rules[name] = body
            continue
        if banned is not None and name in banned:
            worker.skip(name, (), "banned")
            rules[name] = body
            continue
        after = True if unique is None else name in unique.unique_syntactical
        rules[name] = worker.labexp(name, expand_plus(body), (), False, after, worker.bundle.follow(name))
    return g.with_rules(rules), worker


def _assemble(g: Grammar, annotated: Grammar, workers: list[_Annotator], naming: _Naming,
              cfg: AnnotationConfig) -> AnnotationResult:
    recovery = dict(g.recovery)
    origins = dict(g.origins)
    inserted: list[InsertedLabel] = []
    skipped: list[SkippedSite] = []
    kept = {n.label for body in annotated.rules.values() for _, n in walk(body) if isinstance(n, Labeled)}
    for worker in workers:
        for label, body in worker.recovery.items():
            if label in kept:
                recovery.setdefault(label, body)
        inserted += [i for i in worker.inserted if i.label in kept and i not in inserted]
        skipped += [s for s in worker.skipped if s not in skipped]
    # a site labeled by more than one pass keeps only the first label
    seen_sites: set = set()
    unique_inserted = []
    for item in inserted:
        if (item.rule, item.path) not in seen_sites:
            seen_sites.add((item.rule, item.path))
            unique_inserted.append(item)
    inserted = unique_inserted

    result = annotated.with_rules(annotated.rules, recovery=recovery, origins=origins)
    if cfg.protect_start_rule:
        result, extra = _protect(result, naming)
        inserted += extra

    taken = set(g.labels) | set(g.rules)
    names = naming.resolve(taken, {i.label for i in inserted})
    rules = {n: _rename(b, names) for n, b in result.rules.items()}
    recovery = {names.get(l, l): b for l, b in result.recovery.items()}
    for item in inserted:
        origins[names[item.label]] = item.origin
    inserted = [InsertedLabel(names[i.label], i.rule, i.path, i.follow, i.origin) for i in inserted]
    if any(NonTerminal(EAT_TOKEN) == n for body in recovery.values() for _, n in walk(body)):
        if EAT_TOKEN not in rules:
            rules[EAT_TOKEN] = build_eat_token(g)
    final = Grammar(rules, g.start, recovery, origins)
    return AnnotationResult(final, inserted, skipped)


def annotate(g: Grammar, cfg: AnnotationConfig = AnnotationConfig()) -> AnnotationResult:
    """Annotate with the strategy named in ``cfg``."""
    _ensure_annotatable(g, cfg)
    naming = _Naming()
    if cfg.strategy == "unique+banning":
        first, w1 = _run(g, cfg, naming, "unique")
        second, w2 = _run(g, cfg, naming, "banning")
        rules = {n: _union(first.rules[n], second.rules[n]) for n in g.rules}
        return _assemble(g, first.with_rules(rules), [w1, w2], naming, cfg)
    annotated, worker = _run(g, cfg, naming, cfg.strategy)
    return _assemble(g, annotated, [worker], naming, cfg)


def annotate_standard(g: Grammar, cfg: AnnotationConfig | None = None) -> AnnotationResult:
    cfg = cfg or AnnotationConfig()
    return annotate(g, _with_strategy(cfg, "standard"))


def annotate_unique(g: Grammar, cfg: AnnotationConfig | None = None) -> AnnotationResult:
    cfg = cfg or AnnotationConfig(strategy="unique")
    if cfg.strategy not in ("unique", "unique+banning"):
        cfg = _with_strategy(cfg, "unique")
    return annotate(g, cfg)


def annotate_banning(g: Grammar, cfg: AnnotationConfig | None = None) -> AnnotationResult:
    cfg = cfg or AnnotationConfig()
    return annotate(g, _with_strategy(cfg, "banning"))


def _with_strategy(cfg: AnnotationConfig, strategy: str) -> AnnotationConfig:
    return AnnotationConfig(strategy, cfg.preserve_existing, cfg.protect_start_rule, cfg.exclude_rules)


def add_label(g: Grammar, p: Expr, flw: TokenSet, rule: str = "site",
              taken: set[str] | None = None) -> tuple[Expr, str, Expr]:
    """Wrap ``p`` in a fresh label; returns the expression, label and recovery body."""
    taken = set(taken or ()) | g.labels
    base = f"{rule}_{_symbol(p)}".lower()
    label, k = base, 0
    while label in taken:
        k += 1
        label = f"{base}_{k}"
    return Labeled(p, label), label, recovery_expression(g, flw)


# start rule protection

def _spine(body: Expr) -> list[tuple[Path, Expr]]:
    items = flatten_sequence(body)
    spine = []
    for i, item in enumerate(items):
        path = (1,) * i + ((0,) if i < len(items) - 1 else ())
        spine.append((path, item))
    return spine


def _protect(g: Grammar, naming: _Naming) -> tuple[Grammar, list[InsertedLabel]]:
    start = g.start
    if start not in g.rules or is_lexical_name(start) or rule_usages(g, start):
        return g, []
    bundle = analyze(g)
    body = expand_plus(g.rules[start])
    items = flatten_sequence(body)
    new_items, inserted = [], []
    recovery = dict(g.recovery)
    for (path, item) in _spine(body):
        if isinstance(item, Labeled) or bundle.nullable(item):
            new_items.append(item)
            continue
        label = naming.fresh(start, item)
        recovery[label] = Star(AnyChar())
        inserted.append(InsertedLabel(label, start, path, ("<rest of input>",), LabelOrigin.START_RULE))
        new_items.append(Labeled(item, label))
    assert len(new_items) == len(items)
    rebuilt = new_items[-1]
    for item in reversed(new_items[:-1]):
        rebuilt = Sequence(item, rebuilt)
    rules = dict(g.rules)
    rules[start] = rebuilt
    return g.with_rules(rules, recovery=recovery), inserted


def protect_start_rule(g: Grammar) -> Grammar:
    """Label each failure point of the start rule with a consume-the-rest recovery.

    Only the top-level sequence of the start rule is touched, and only when
    nothing else calls the start rule, so a failure there is a failure of
    the whole parse and the language stays the same.
    """
    naming = _Naming()
    protected, inserted = _protect(g, naming)
    if not inserted:
        return g
    names = naming.resolve(set(g.labels) | set(g.rules))
    rules = {n: _rename(b, names) for n, b in protected.rules.items()}
    recovery = {names.get(l, l): b for l, b in protected.recovery.items()}
    origins = dict(g.origins)
    for item in inserted:
        origins[names[item.label]] = LabelOrigin.START_RULE
    return Grammar(rules, g.start, recovery, origins)


# merging

def _peel(e: Expr) -> tuple[list[str], Expr]:
    labels = []
    while isinstance(e, Labeled):
        labels.append(e.label)
        e = e.inner
    return labels, e


def _wrap(e: Expr, labels: list[str]) -> Expr:
    for label in reversed(labels):
        e = Labeled(e, label)
    return e


def _union(primary: Expr, secondary: Expr, adopt: dict | None = None) -> Expr:
    """Labels of ``primary`` win; ``secondary`` fills unlabeled sites.

    When both label a site, ``adopt`` records primary label -> secondary label
    so recovery rules can be shared.
    """
    la, a = _peel(primary)
    lb, b = _peel(secondary)
    kids_a, kids_b = children(a), children(b)
    if kids_a:
        a = with_children(a, tuple(_union(x, y, adopt) for x, y in zip(kids_a, kids_b)))
    if la and lb and adopt is not None:
        for label in la:
            adopt.setdefault(label, lb[0])
    return _wrap(a, la or lb)


def merge_annotations(generated: Grammar, manual: Grammar) -> Grammar:
    """Combine two annotations of the same unlabeled grammar; manual wins."""
    if skeleton(generated) != skeleton(manual):
        raise AnnotationError("grammars do not share the same unlabeled skeleton")
    adopt: dict[str, str] = {}
    rules = {}
    for name, body in manual.rules.items():
        if name == EAT_TOKEN:
            continue
        rules[name] = _union(expand_plus(body), expand_plus(generated.rules[name]), adopt)
    used = {n.label for body in rules.values() for _, n in walk(body) if isinstance(n, Labeled)}
    recovery, origins = {}, {}
    for label in sorted(used, key=lambda l: (l not in manual.labels, l)):
        if label in manual.recovery:
            recovery[label] = manual.recovery[label]
        elif label in manual.labels and label in adopt and adopt[label] in generated.recovery:
            recovery[label] = generated.recovery[adopt[label]]
        elif label not in manual.labels and label in generated.recovery:
            recovery[label] = generated.recovery[label]
        if label in manual.labels:
            origins[label] = manual.origin(label)
        else:
            origins[label] = generated.origin(label)
    for label, body in manual.recovery.items():
        recovery.setdefault(label, body)
    eat = manual.rules.get(EAT_TOKEN) or generated.rules.get(EAT_TOKEN)
    if eat is not None and any(NonTerminal(EAT_TOKEN) == n for b in recovery.values() for _, n in walk(b)):
        rules[EAT_TOKEN] = eat
    return Grammar(rules, manual.start, recovery, origins)
