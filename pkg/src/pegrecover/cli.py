"""Command line front end: ``pegrecover <command> ...``.

Exit codes: 0 success, 1 invalid grammar, 2 grammar syntax error,
3 parse finished with recovered errors, 4 parse failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .analysis import analyze, ban_set, compute_uniqueness, token_rules, unique_token_prefix_report
from .annotator import AnnotationConfig, AnnotationError, annotate
from .engine import format_error, parse_to_tree
from .evaluation import GOOD_RECALL, diff_labels, read_corpus, run_corpus
from .grammar import Grammar
from .reader import GrammarSyntaxError, pretty_print, read_grammar_file, validate

EXIT_OK, EXIT_INVALID, EXIT_SYNTAX = 0, 1, 2
EXIT_RECOVERED, EXIT_FAILED, EXIT_USAGE = 3, 4, 64

FIXTURES = Path(__file__).parent / "fixtures"


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load(path: str, check: bool = True) -> Grammar:
    try:
        g = read_grammar_file(path)
    except GrammarSyntaxError as exc:
        raise CliError(str(exc), EXIT_SYNTAX) from exc
    except OSError as exc:
        raise CliError(f"{path}: {exc.strerror}", EXIT_USAGE) from exc
    if check:
        report = validate(g)
        if not report.ok:
            raise CliError("\n".join(f"{path}: {e.kind} in {e.rule}: {e.detail}" for e in report.errors),
                           EXIT_INVALID)
    return g


def _write(text: str, output: str | None):
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def cmd_check(args) -> int:
    g = _load(args.grammar, check=False)
    report = validate(g)
    for e in report.errors:
        print(f"{args.grammar}: {e.kind} in {e.rule}: {e.detail}", file=sys.stderr)
    if report.ok:
        print(f"{args.grammar}: ok ({len(g.rules)} rules, {len(g.labels)} labels)")
    return EXIT_OK if report.ok else EXIT_INVALID


def analysis_tables(g: Grammar) -> dict:
    bundle = analyze(g)
    rules = [n for n in g.syntactical if n in bundle.rules]
    unique = compute_uniqueness(g)
    bans = ban_set(g)
    prefix = unique_token_prefix_report(g, [])
    return {
        "start": g.start,
        "tokens": token_rules(g),
        "nullable": {n: bundle.nullable(bundle.rules[n]) for n in rules},
        "first": {n: bundle.first(bundle.rules[n]).names() for n in rules},
        "follow": {n: bundle.follow(n).names() for n in rules},
        "unique_lexical": sorted(unique.unique_lexical),
        "unique_syntactical": sorted(unique.unique_syntactical),
        "unique_occurrences": [{"rule": r, "path": list(p)} for r, p in sorted(unique.unique_occurrences)],
        "banned": {n: bans.reasons.get(n, "") for n in sorted(bans.banned)},
        "token_prefix_warnings": [{"tokens": [a, b], "chars": c} for a, b, c in prefix.warnings],
    }


def cmd_analyze(args) -> int:
    g = _load(args.grammar)
    _write(_dump(analysis_tables(g)), args.output)
    return EXIT_OK


def cmd_annotate(args) -> int:
    g = _load(args.grammar)
    strategy = args.strategy.replace("-", "+")
    cfg = AnnotationConfig(strategy, args.preserve, args.protect_start, frozenset(args.exclude))
    try:
        result = annotate(g, cfg)
    except AnnotationError as exc:
        raise CliError(f"{args.grammar}: {exc}", EXIT_INVALID) from exc
    _write(pretty_print(result.grammar), args.output)
    if args.report:
        Path(args.report).write_text(_dump(result.to_json()))
    print(f"inserted {len(result.inserted)} labels, skipped {len(result.skipped)} sites", file=sys.stderr)
    return EXIT_OK


def cmd_parse(args) -> int:
    g = _load(args.grammar)
    try:
        text = Path(args.input).read_text()
    except OSError as exc:
        raise CliError(f"{args.input}: {exc.strerror}", EXIT_USAGE) from exc
    messages = json.loads(Path(args.messages).read_text()) if args.messages else None
    result = parse_to_tree(g, text, Path(args.input).name, recovery=not args.no_recovery, messages=messages)
    if args.errors == "json":
        sys.stdout.write(_dump([e.to_json() for e in result.errors]))
    else:
        for e in result.errors:
            print(format_error(e, column=args.column))
    if args.ast and result.tree is not None:
        Path(args.ast).write_text(_dump(result.tree.to_json()))
    if result.tree is None:
        return EXIT_FAILED
    return EXIT_RECOVERED if result.errors else EXIT_OK


def cmd_eval_labels(args) -> int:
    generated = _load(args.generated)
    reference = _load(args.reference)
    corpus = read_corpus(args.valid) if args.valid else []
    try:
        diff = diff_labels(generated, reference, corpus)
    except AnnotationError as exc:
        raise CliError(str(exc), EXIT_INVALID) from exc
    if args.json:
        sys.stdout.write(_dump(diff.to_json()))
        return EXIT_OK
    print(f"equal {len(diff.equal)}  extra {len(diff.extra)}  wrong {len(diff.wrong)}  missing {len(diff.missing)}")
    for site in diff.wrong:
        label = diff.label_at(site)
        w = diff.witnesses[label]
        print(f"wrong {label} at {site[0]} {list(site[1])}: thrown on {w.source} at offset {w.position}")
    return EXIT_OK


def cmd_eval_recovery(args) -> int:
    g = _load(args.grammar)
    summary = run_corpus(g, args.invalid, args.intended, args.good_recall)
    _write(summary.dumps() + "\n" if args.json else summary.to_text(), None)
    return EXIT_OK


def cmd_fixtures(args) -> int:
    for path in sorted(FIXTURES.glob("*.peg")):
        print(path)
    print(FIXTURES / "corpus")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pegrecover", description="Labeled PEG analysis, annotation and error recovery.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("check", help="validate a grammar file")
    p.add_argument("grammar")
    p.set_defaults(run=cmd_check)

    p = sub.add_parser("analyze", help="dump FIRST/FOLLOW/uniqueness/ban tables as JSON")
    p.add_argument("grammar")
    p.add_argument("-o", "--output")
    p.set_defaults(run=cmd_analyze)

    p = sub.add_parser("annotate", help="insert error labels and recovery rules")
    p.add_argument("grammar")
    p.add_argument("--strategy", default="standard",
                   choices=["standard", "unique", "unique-banning", "unique+banning", "banning"])
    p.add_argument("--preserve", action="store_true", help="keep labels already in the grammar")
    p.add_argument("--protect-start", action="store_true", help="label the start rule with skip-to-end recovery")
    p.add_argument("--exclude", action="append", default=[], metavar="RULE", help="leave RULE untouched")
    p.add_argument("-o", "--output")
    p.add_argument("--report", help="write inserted/skipped sites as JSON")
    p.set_defaults(run=cmd_annotate)

    p = sub.add_parser("parse", help="parse a file and report syntax errors")
    p.add_argument("grammar")
    p.add_argument("input")
    p.add_argument("--ast", help="write the syntax tree as JSON")
    p.add_argument("--errors", choices=["text", "json"], default="text")
    p.add_argument("--no-recovery", action="store_true")
    p.add_argument("--column", action="store_true", help="include the column in error lines")
    p.add_argument("--messages", help="JSON object mapping labels to error messages")
    p.set_defaults(run=cmd_parse)

    p = sub.add_parser("eval-labels", help="compare generated labels with a reference annotation")
    p.add_argument("generated")
    p.add_argument("reference")
    p.add_argument("--valid", help="directory of valid inputs used to find wrong labels")
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_eval_labels)

    p = sub.add_parser("eval-recovery", help="rate recovery over a corpus of broken files")
    p.add_argument("grammar")
    p.add_argument("--invalid", required=True)
    p.add_argument("--intended", required=True)
    p.add_argument("--good-recall", type=float, default=GOOD_RECALL)
    p.add_argument("--json", action="store_true")
    p.set_defaults(run=cmd_eval_recovery)

    p = sub.add_parser("fixtures", help="list the bundled fixture grammars")
    p.set_defaults(run=cmd_fixtures)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except CliError as exc:
        print(exc, file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
