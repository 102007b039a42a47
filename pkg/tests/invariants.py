"""Helpers shared by the property and acceptance suites."""

import random

from conftest import load
from pegrecover.analysis import compute_uniqueness
from pegrecover.engine import match
from pegrecover.evaluation import token_alphabet
from pegrecover.grammar import (
    Grammar, Literal, NonTerminal, Not, Sequence, Throw, expand_plus, node_at, transform, walk,
)

# fixture grammars plus start rules that reach the interesting parts in few tokens
VARIANTS = [("toyjava", None), ("toyjava", "blockStmt"), ("titan", None), ("pascal", None),
            ("pascal", "block"), ("cifelse", None)]


def variant(name, start=None):
    grammar = load(name)
    return grammar if start is None else Grammar(grammar.rules, start)


def variant_id(name, start):
    return name if start is None else f"{name}@{start}"


def random_inputs(grammar, count, seed):
    rng = random.Random(seed)
    lexemes = list(token_alphabet(grammar).values())
    for _ in range(count):
        yield " ".join(rng.choice(lexemes) for _ in range(rng.randint(0, 12))) + " "


def explore(grammars, alphabet, max_tokens, visit):
    """Depth-first over token sequences; stop where no grammar looked past the input."""
    tokens = sorted(alphabet.items())

    def go(names, text):
        outcomes = [match(gr, None, text, recovery={}) for gr in grammars]
        visit(names, text, outcomes)
        if len(names) == max_tokens or all(o.examined < len(text) for o in outcomes):
            return
        for name, lexeme in tokens:
            go(names + (name,), text + lexeme + " ")

    go((), "")


def unique_sites(grammar):
    """Every occurrence of a token the analysis considers unique there."""
    info = compute_uniqueness(grammar)
    sites = set()
    for rule in grammar.syntactical:
        for path, n in walk(expand_plus(grammar.rules[rule])):
            if isinstance(n, NonTerminal) and info.is_unique_at(n.name, rule, path):
                sites.add((rule, path))
    return sites


def after_sites(grammar, sites, suffix):
    """``grammar`` with ``suffix`` run right after each site."""
    rules = dict(grammar.rules)
    for rule in grammar.syntactical:
        wanted = {p for r, p in sites if r == rule}
        if not wanted:
            continue
        body = expand_plus(grammar.rules[rule])
        targets = {id(node_at(body, p)) for p in wanted}
        rules[rule] = transform(body, lambda e: Sequence(e, suffix) if id(e) in targets else e)
    return Grammar(rules, grammar.start)


def forced_failure_check(grammar, max_tokens=8):
    """Inputs reaching a unique site, and those where a forced failure there did not sink the parse."""
    sites = unique_sites(grammar)
    probe = after_sites(grammar, sites, Throw("probe"))
    forced = after_sites(grammar, sites, Not(Literal("")))
    reached, violations = [], []

    def visit(names, text, outcomes):
        probed, failed = outcomes
        if not probed.ok and probed.label == "probe":
            reached.append(names)
            if failed.ok:
                violations.append(names)

    explore([probe, forced], token_alphabet(grammar), max_tokens, visit)
    return reached, violations


def token_log_conflicts(grammars, texts):
    """Start offsets tokenized two different ways across runs and grammars."""
    conflicts = []
    for text in texts:
        seen = {}
        for grammar in grammars:
            for _ in range(2):
                for token, start, end in match(grammar, None, text, recovery={}).token_log:
                    if seen.setdefault(start, (token, end)) != (token, end):
                        conflicts.append((text, start))
    return conflicts
