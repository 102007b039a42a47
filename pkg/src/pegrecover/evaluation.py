"""Judging annotations and recoveries.

``diff_labels`` compares a generated annotation with a hand-written one
site by site and finds labels that make valid programs fail.
``rate_recovery`` compares the tree built for a broken program with the
tree of its corrected twin and buckets the result as excellent, good,
poor or awful.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path as FsPath

from .analysis import token_rules
from .annotator import AnnotationError
from .engine import Failure, SyntaxTree, match, parse_to_tree
from .grammar import (
    AnyChar, CharClass, Choice, Grammar, Labeled, Literal, NonTerminal, Path, Plus, Sequence,
    label_sites, skeleton, transform,
)

GOOD_RECALL = 0.75


@dataclass(frozen=True)
class Witness:
    label: str
    source: str
    text: str
    position: int

    def to_json(self) -> dict:
        return {"label": self.label, "source": self.source, "position": self.position}


@dataclass
class LabelDiff:
    equal: list[tuple[str, Path]] = field(default_factory=list)
    extra: list[tuple[str, Path]] = field(default_factory=list)
    wrong: list[tuple[str, Path]] = field(default_factory=list)
    # reference sites the generated grammar left alone
    missing: list[tuple[str, Path]] = field(default_factory=list)
    labels: dict[tuple[str, Path], str] = field(default_factory=dict)
    witnesses: dict[str, Witness] = field(default_factory=dict)

    @property
    def wrong_labels(self) -> set[str]:
        return {self.labels[s] for s in self.wrong}

    def label_at(self, site: tuple[str, Path]) -> str:
        return self.labels[site]

    def to_json(self) -> dict:
        def rows(sites):
            return [{"rule": r, "path": list(p), "label": self.labels.get((r, p))} for r, p in sites]
        return {
            "equal": {"count": len(self.equal), "sites": rows(self.equal)},
            "extra": {"count": len(self.extra), "sites": rows(self.extra)},
            "wrong": {"count": len(self.wrong), "sites": rows(self.wrong)},
            "missing": {"count": len(self.missing),
                        "sites": [{"rule": r, "path": list(p)} for r, p in self.missing]},
            "witnesses": {k: w.to_json() for k, w in sorted(self.witnesses.items())},
        }


def keep_only_label(g: Grammar, label: str) -> Grammar:
    """``g`` with every ``[p]^l`` other than ``label`` replaced by ``p``."""
    def drop(e):
        return e.inner if isinstance(e, Labeled) and e.label != label else e
    return g.map_rules(lambda _, body: transform(body, drop))


def find_witness(g: Grammar, label: str, corpus: list[tuple[str, str]]) -> Witness | None:
    """First valid input on which ``label`` alone, without recovery, is thrown."""
    isolated = keep_only_label(g, label)
    for source, text in corpus:
        outcome = match(isolated, None, text, recovery={})
        if isinstance(outcome, Failure) and outcome.label == label:
            return Witness(label, source, text, outcome.position)
    return None


def diff_labels(generated: Grammar, reference: Grammar,
                valid_corpus: list[tuple[str, str]] | list[str]) -> LabelDiff:
    """Classify generated label sites as equal, extra and wrong.

    A label is wrong when, kept on its own and with recovery turned off,
    it is thrown on some input of ``valid_corpus``. Checking each label in
    isolation stops one bad label from hiding another.
    """
    if skeleton(generated) != skeleton(reference):
        raise AnnotationError("grammars do not share the same unlabeled skeleton")
    corpus = [c if isinstance(c, tuple) else (f"<input {i}>", c) for i, c in enumerate(valid_corpus)]
    gen_sites = label_sites(generated)
    ref_sites = label_sites(reference)
    diff = LabelDiff(labels=dict(gen_sites))
    for site in sorted(gen_sites):
        (diff.equal if site in ref_sites else diff.extra).append(site)
    diff.missing = sorted(set(ref_sites) - set(gen_sites))
    for label in sorted(set(gen_sites.values())):
        witness = find_witness(generated, label, corpus)
        if witness is not None:
            diff.witnesses[label] = witness
    diff.wrong = sorted(s for s, l in gen_sites.items() if l in diff.witnesses)
    return diff


# recovery quality

class Rating(str, enum.Enum):
    EXCELLENT = "excellent"
    GOOD = "good"
    POOR = "poor"
    AWFUL = "awful"


@dataclass(frozen=True)
class RecoveryRating:
    rating: Rating
    similarity: float
    matched: int = 0
    intended: int = 0
    error_nodes: int = 0

    @property
    def acceptable(self) -> bool:
        return self.rating in (Rating.EXCELLENT, Rating.GOOD)

    def to_json(self) -> dict:
        return {"rating": self.rating.value, "similarity": round(self.similarity, 4),
                "detail": {"matched": self.matched, "intended": self.intended,
                           "error_nodes": self.error_nodes}}


def _key(t: SyntaxTree) -> tuple:
    return (t.kind, t.name, t.text if t.kind == "token" else None)


def _token_count(t: SyntaxTree) -> int:
    return sum(1 for n in t.nodes() if n.kind == "token")


def _stands_in(t: SyntaxTree) -> bool:
    return _token_count(t) == 1 and not t.errors()


def equal_modulo_errors(got: SyntaxTree, intended: SyntaxTree) -> bool:
    """Same shape, where an Error leaf may replace nothing or one single-token subtree."""

    def same(a: SyntaxTree, b: SyntaxTree) -> bool:
        return _key(a) == _key(b) and seq_match(tuple(a.children), tuple(b.children))

    def seq_match(xs: tuple, ys: tuple) -> bool:
        @lru_cache(maxsize=None)
        def go(i: int, j: int) -> bool:
            if i == len(xs):
                return j == len(ys)
            x = xs[i]
            if x.kind == "error":
                if go(i + 1, j):
                    return True
                return j < len(ys) and _stands_in(ys[j]) and go(i + 1, j + 1)
            return j < len(ys) and same(x, ys[j]) and go(i + 1, j + 1)
        return go(0, 0)

    return same(got, intended)


def _preorder(t: SyntaxTree) -> list[tuple]:
    return [_key(n) for n in t.nodes() if n.kind != "error"]


def _lcs(a: list, b: list) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def rate_recovery(got: SyntaxTree | None, intended: SyntaxTree,
                  good_recall: float = GOOD_RECALL) -> RecoveryRating:
    """Rate a recovered tree against the tree of the intended program.

    Nodes are compared by kind, name and token text, in pre-order; the
    recall is the share of intended nodes found in order in ``got``.
    """
    wanted = _preorder(intended)
    if got is None:
        return RecoveryRating(Rating.AWFUL, 0.0, 0, len(wanted), 0)
    errors = len(got.errors())
    if equal_modulo_errors(got, intended):
        return RecoveryRating(Rating.EXCELLENT, 1.0, len(wanted), len(wanted), errors)
    have = _preorder(got)
    # the root node alone carries no information
    if len(have) <= 1 and not [n for n in got.nodes() if n.kind == "token"]:
        return RecoveryRating(Rating.AWFUL, 0.0, 0, len(wanted), errors)
    matched = _lcs(have, wanted)
    recall = matched / len(wanted) if wanted else 0.0
    rating = Rating.GOOD if recall >= good_recall else Rating.POOR if recall > 0 else Rating.AWFUL
    return RecoveryRating(rating, recall, matched, len(wanted), errors)


# corpora

@dataclass
class CorpusRow:
    file: str
    rating: RecoveryRating | None
    errors: int
    note: str = ""

    def to_json(self) -> dict:
        row = {"file": self.file, "errors": self.errors}
        if self.rating is not None:
            row.update(self.rating.to_json())
        if self.note:
            row["note"] = self.note
        return row


@dataclass
class CorpusSummary:
    rows: list[CorpusRow] = field(default_factory=list)
    missing: list[str] = field(default_factory=list)

    def count(self, rating: Rating) -> int:
        return sum(1 for r in self.rows if r.rating is not None and r.rating.rating is rating)

    @property
    def rated(self) -> int:
        return sum(1 for r in self.rows if r.rating is not None)

    def share(self, *ratings: Rating) -> float:
        return sum(self.count(r) for r in ratings) / self.rated if self.rated else 0.0

    @property
    def acceptable_share(self) -> float:
        return self.share(Rating.EXCELLENT, Rating.GOOD)

    def to_json(self) -> dict:
        return {
            "files": [r.to_json() for r in self.rows],
            "missing": self.missing,
            "totals": {r.value: self.count(r) for r in Rating} | {"rated": self.rated},
            "percent": {r.value: round(100 * self.share(r), 1) for r in Rating}
            | {"acceptable": round(100 * self.acceptable_share, 1)},
        }

    def to_text(self) -> str:
        width = max([len(r.file) for r in self.rows] + [4])
        lines = [f"{'file'.ljust(width)}  rating     recall  errors"]
        for r in self.rows:
            if r.rating is None:
                lines.append(f"{r.file.ljust(width)}  -          -       {r.errors:>6}  {r.note}")
                continue
            lines.append(f"{r.file.ljust(width)}  {r.rating.rating.value:<9}  "
                         f"{r.rating.similarity:6.2f}  {r.errors:>6}" + (f"  {r.note}" if r.note else ""))
        for name in self.missing:
            lines.append(f"{name.ljust(width)}  missing twin")
        lines.append("")
        for rating in Rating:
            lines.append(f"{rating.value:<10} {self.count(rating):>4}  {100 * self.share(rating):5.1f}%")
        lines.append(f"{'acceptable':<10} {self.count(Rating.EXCELLENT) + self.count(Rating.GOOD):>4}"
                     f"  {100 * self.acceptable_share:5.1f}%")
        return "\n".join(lines) + "\n"

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True)


def rate_file(g: Grammar, broken: str, fixed: str, name: str = "<input>",
              good_recall: float = GOOD_RECALL) -> CorpusRow:
    got = parse_to_tree(g, broken, name)
    intended = parse_to_tree(g, fixed, name)
    if intended.tree is None or intended.errors:
        return CorpusRow(name, None, len(got.errors), "corrected twin does not parse cleanly")
    return CorpusRow(name, rate_recovery(got.tree, intended.tree, good_recall), len(got.errors))


def run_corpus(g: Grammar, corpus_dir, intended_dir, good_recall: float = GOOD_RECALL) -> CorpusSummary:
    """Rate every file of ``corpus_dir`` against its namesake in ``intended_dir``."""
    corpus_dir, intended_dir = FsPath(corpus_dir), FsPath(intended_dir)
    summary = CorpusSummary()
    for path in sorted(p for p in corpus_dir.iterdir() if p.is_file()):
        twin = intended_dir / path.name
        if not twin.is_file():
            summary.missing.append(path.name)
            continue
        summary.rows.append(rate_file(g, path.read_text(), twin.read_text(), path.name, good_recall))
    return summary


def read_corpus(directory) -> list[tuple[str, str]]:
    directory = FsPath(directory)
    return [(p.name, p.read_text()) for p in sorted(directory.iterdir()) if p.is_file()]


# language comparison by enumeration

def sample_lexeme(g: Grammar, name: str) -> str | None:
    """A short string the token rule ``name`` matches in full, if one is easy to find."""

    def build(e, depth=0) -> str:
        if depth > 20:
            return ""
        if isinstance(e, Literal):
            return e.text
        if isinstance(e, CharClass):
            if not e.negated:
                return e.ranges[0][0]
            return next(c for c in "axq0" if e.matches(c))
        if isinstance(e, AnyChar):
            return "a"
        if isinstance(e, NonTerminal):
            return build(g.rules[e.name], depth + 1)
        if isinstance(e, Sequence):
            return build(e.left, depth) + build(e.right, depth)
        if isinstance(e, Choice):
            return build(e.left, depth)
        if isinstance(e, Plus):
            return build(e.inner, depth)
        if isinstance(e, Labeled):
            return build(e.inner, depth)
        return ""  # Empty, Star, Optional, predicates, throws

    text = build(g.rules[name])
    outcome = match(g, NonTerminal(name), text, lexical=True)
    return text if text and outcome.ok and outcome.end == len(text) else None


def token_alphabet(g: Grammar) -> dict[str, str]:
    """Token rule -> sample lexeme, for every token rule that has one."""
    alphabet = {}
    for name in token_rules(g):
        lexeme = sample_lexeme(g, name)
        if lexeme is not None:
            alphabet[name] = lexeme
    return alphabet


@dataclass
class LanguageComparison:
    inputs: int = 0
    discrepancies: list[tuple[tuple[str, ...], object, object]] = field(default_factory=list)


def compare_languages(reference: Grammar, candidate: Grammar, max_tokens: int = 8,
                      alphabet: dict[str, str] | None = None) -> LanguageComparison:
    """Compare two grammars on every token sequence up to ``max_tokens`` long.

    Recovery is disabled on both sides. Inputs are sample lexemes joined by
    spaces. A prefix is not extended when neither parse looked past its
    last character, since every extension then has the same outcome.
    """
    alphabet = alphabet if alphabet is not None else token_alphabet(reference)
    tokens = sorted(alphabet.items())
    result = LanguageComparison()

    def verdict(outcome):
        return ("ok", outcome.end) if outcome.ok else ("failed",)

    def explore(names: tuple[str, ...], text: str):
        a = match(reference, None, text, recovery={})
        b = match(candidate, None, text, recovery={})
        result.inputs += 1
        if verdict(a) != verdict(b):
            result.discrepancies.append((names, a, b))
        if len(names) == max_tokens:
            return
        if a.examined < len(text) and b.examined < len(text):
            return
        for name, lexeme in tokens:
            explore(names + (name,), text + lexeme + " ")

    explore((), "")
    return result
