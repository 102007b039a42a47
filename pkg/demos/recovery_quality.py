"""Rate recovery on the bundled toy Java mutants, one table per strategy.

Run with ``python demos/recovery_quality.py``.
"""

from pathlib import Path

from pegrecover.annotator import STRATEGIES, AnnotationConfig, annotate
from pegrecover.evaluation import run_corpus
from pegrecover.reader import read_grammar_file

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "pegrecover" / "fixtures"
CORPUS = FIXTURES / "corpus" / "toyjava"

grammar = read_grammar_file(FIXTURES / "toyjava.peg")
for strategy in STRATEGIES:
    labeled = annotate(grammar, AnnotationConfig(strategy, protect_start_rule=True)).grammar
    summary = run_corpus(labeled, CORPUS / "invalid", CORPUS / "fixed")
    print(f"== {strategy} ==")
    print(summary.to_text())
