"""Where the standard algorithm goes wrong and how the unique algorithm avoids it.

Run with ``python demos/unique_vs_standard.py``.
"""

from pathlib import Path

from pegrecover.annotator import AnnotationConfig, annotate
from pegrecover.engine import match
from pegrecover.evaluation import compare_languages, diff_labels, read_corpus
from pegrecover.grammar import Grammar
from pegrecover.reader import read_grammar_file

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "pegrecover" / "fixtures"


def load(name):
    return read_grammar_file(FIXTURES / f"{name}.peg")


print("== A Pascal procedure call ==")
pascal = load("pascal")
call = "program p; begin f(x) end."
print(f"unlabeled grammar accepts {call!r}: {match(pascal, None, call).ok}")
for strategy in ("standard", "unique"):
    labeled = annotate(pascal, AnnotationConfig(strategy)).grammar
    outcome = match(labeled, None, call, recovery={})
    verdict = "accepts" if outcome.ok else f"rejects with [{outcome.label}]"
    print(f"{strategy:>8}: {verdict}")
print("`f` starts both an assignment and a call, so a label after the variable fires too early.")

print("\n== Wrong labels against the Titan reference ==")
titan, reference = load("titan"), load("titan_labeled")
corpus = read_corpus(FIXTURES / "corpus" / "titan" / "valid")
for strategy in ("standard", "unique", "unique+banning"):
    generated = annotate(titan, AnnotationConfig(strategy)).grammar
    diff = diff_labels(generated, reference, corpus)
    print(f"{strategy:>15}: equal {len(diff.equal):2}  extra {len(diff.extra):2}  "
          f"wrong {sorted(diff.wrong_labels) or '-'}")

print("\n== Every token sequence up to 6 tokens ==")
# starting Pascal at a block gets to statements within six tokens
samples = {"pascal@block": Grammar(pascal.rules, "block"), "titan": titan, "cifelse": load("cifelse")}
for name, grammar in samples.items():
    for strategy in ("standard", "unique"):
        labeled = annotate(grammar, AnnotationConfig(strategy)).grammar
        result = compare_languages(grammar, labeled, max_tokens=6)
        print(f"{name:>12} {strategy:>8}: {result.inputs:6} inputs, "
              f"{len(result.discrepancies)} change their verdict")
