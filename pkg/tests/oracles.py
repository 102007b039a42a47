"""Textbook FIRST/FOLLOW over a context-free rewrite of a PEG.

Kept separate from the library on purpose: the grammar is flattened into
plain productions (lists of symbols) and the classic fixpoint is run over
those. Predicates become empty productions and throws become a symbol with
no productions at all.
"""

from itertools import count

from pegrecover.grammar import (
    And, AnyChar, CharClass, Choice, Empty, Labeled, Literal, NonTerminal, Not, Optional, Plus,
    Sequence, Star, Throw, is_lexical_name,
)

EPS = "<eps>"
END = "$eof"
DEAD = "<dead>"


def to_cfg(grammar):
    """Return (productions, terminals) for the syntactical part of ``grammar``."""
    prods: dict[str, list[list[str]]] = {DEAD: []}
    fresh = count()

    def helper(alts):
        name = f"<h{next(fresh)}>"
        prods[name] = alts
        return name

    def symbols(e):
        if isinstance(e, NonTerminal):
            return [e.name]
        if isinstance(e, Literal):
            return [repr(e.text)] if e.text else []
        if isinstance(e, (AnyChar, CharClass)):
            return ["."]
        if isinstance(e, Empty) or isinstance(e, (Not, And)):
            return []
        if isinstance(e, Throw):
            return [DEAD]
        if isinstance(e, Labeled):
            return symbols(e.inner)
        if isinstance(e, Sequence):
            return symbols(e.left) + symbols(e.right)
        if isinstance(e, Choice):
            return [helper([symbols(e.left), symbols(e.right)])]
        if isinstance(e, Optional):
            return [helper([symbols(e.inner), []])]
        if isinstance(e, Star):
            name = f"<h{next(fresh)}>"
            prods[name] = [symbols(e.inner) + [name], []]
            return [name]
        if isinstance(e, Plus):
            return symbols(Sequence(e.inner, Star(e.inner)))
        raise TypeError(e)

    for name, body in grammar.rules.items():
        if not is_lexical_name(name):
            prods[name] = [symbols(body)]
    return prods


def is_terminal(sym, prods):
    return sym not in prods


def first_sets(prods):
    first = {n: set() for n in prods}
    changed = True
    while changed:
        changed = False
        for n, alts in prods.items():
            for alt in alts:
                new = first_of(alt, first, prods)
                if not new <= first[n]:
                    first[n] |= new
                    changed = True
    return first


def first_of(symbols, first, prods):
    out = set()
    for sym in symbols:
        if is_terminal(sym, prods):
            out.add(sym)
            return out
        out |= first[sym] - {EPS}
        if EPS not in first[sym]:
            return out
    out.add(EPS)
    return out


def follow_sets(prods, first, start):
    follow = {n: set() for n in prods}
    follow[start].add(END)
    changed = True
    while changed:
        changed = False
        for n, alts in prods.items():
            for alt in alts:
                for i, sym in enumerate(alt):
                    if is_terminal(sym, prods):
                        continue
                    rest = first_of(alt[i + 1:], first, prods)
                    new = rest - {EPS}
                    if EPS in rest:
                        new |= follow[n]
                    if not new <= follow[sym]:
                        follow[sym] |= new
                        changed = True
    return follow


def oracle(grammar):
    """FIRST and FOLLOW for every syntactical rule, as sets of token names."""
    prods = to_cfg(grammar)
    first = first_sets(prods)
    follow = follow_sets(prods, first, grammar.start)
    rules = [n for n in grammar.rules if not is_lexical_name(n)]
    return ({n: first[n] for n in rules}, {n: follow[n] for n in rules})
