from pathlib import Path

import pytest

from pegrecover.evaluation import read_corpus
from pegrecover.reader import read_grammar, read_grammar_file

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "pegrecover" / "fixtures"
CORPUS = FIXTURES / "corpus"
GRAMMARS = ("toyjava", "titan", "pascal", "cifelse")


def load(name: str):
    return read_grammar_file(FIXTURES / f"{name}.peg")


def valid_corpus(name: str):
    return read_corpus(CORPUS / name / "valid")


def g(text: str):
    return read_grammar(text)


@pytest.fixture(scope="session")
def toyjava():
    return load("toyjava")


@pytest.fixture(scope="session")
def fig3():
    return load("toyjava_labeled")


@pytest.fixture(scope="session")
def fig3_recovering(fig3):
    """The hand-labeled toy Java grammar with generated recovery rules."""
    from pegrecover.annotator import AnnotationConfig, annotate

    cfg = AnnotationConfig("standard", preserve_existing=True, exclude_rules=frozenset({"prog"}))
    return annotate(fig3, cfg).grammar
