"""Parsing expression grammars with labeled failures and automatic error recovery."""

__version__ = "0.1.0"

from .analysis import (  # noqa: E402
    BanSet, GrammarAnalysis, Token, TokenSet, UniquenessInfo, analyze, ban_set, calck,
    compute_uniqueness, first, follow, match_uni, nullable, unique_token_prefix_report,
)
from .annotator import (  # noqa: E402
    AnnotationConfig, AnnotationError, AnnotationResult, add_label, annotate, annotate_banning,
    annotate_standard, annotate_unique, build_eat_token, merge_annotations, protect_start_rule,
)
from .engine import (  # noqa: E402
    ErrorReport, Failure, MatchOutcome, ParseResult, Success, SyntaxTree, format_error, match,
    parse_to_tree,
)
from .evaluation import (  # noqa: E402
    CorpusSummary, LabelDiff, Rating, RecoveryRating, diff_labels, rate_recovery, run_corpus,
)
from .grammar import Grammar, LabelOrigin, desugar, is_unlabeled  # noqa: E402
from .reader import (  # noqa: E402
    GrammarSource, GrammarSyntaxError, ValidationReport, pretty_print, read_grammar,
    read_grammar_file, validate,
)
