"""Annotate the toy Java grammar, then watch it report two syntax errors in one run.

Run with ``python demos/toy_java_walkthrough.py``.
"""

from pathlib import Path

from pegrecover.annotator import AnnotationConfig, annotate
from pegrecover.engine import format_error, parse_to_tree
from pegrecover.grammar import label_sites
from pegrecover.reader import print_expression, read_grammar_file

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "pegrecover" / "fixtures"

plain = read_grammar_file(FIXTURES / "toyjava.peg")
reference = read_grammar_file(FIXTURES / "toyjava_labeled.peg")

print("== The standard algorithm on the unlabeled grammar ==")
result = annotate(plain, AnnotationConfig("standard", exclude_rules=frozenset({"prog"})))
for rule in ("whileStmt", "ifStmt"):
    print(f"{rule} <- {print_expression(result.grammar.rules[rule])}")
print(f"recovery for whilestmt_rpar: {print_expression(result.grammar.recovery['whilestmt_rpar'])}")

missing = {label for site, label in label_sites(reference).items() if site not in result.sites()}
print(f"\n{len(result.inserted)} labels inserted; the hand annotation also has {sorted(missing)}")
print("(the else branch follows a choice whose alternatives both may see ELSE)")

print("\n== Parsing a program with two mistakes ==")
# keep the hand-written labels, let the annotator write their recovery rules
labeled = annotate(reference, AnnotationConfig("standard", preserve_existing=True,
                                               exclude_rules=frozenset({"prog"}))).grammar
source = FIXTURES / "factorial.java"
messages = {"rparwhile": "missing ')' in while"}
tree, errors = parse_to_tree(labeled, source.read_text(), source.name, messages=messages)
for error in errors:
    print(format_error(error))

print("\nthe parse still produced a tree; its error leaves:")
for leaf in tree.errors():
    print(f"  {leaf.label} skipped {source.read_text()[leaf.span[0]:leaf.span[1]]!r}")
