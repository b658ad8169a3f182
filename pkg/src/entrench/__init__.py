"""Belief filtering by epistemic entrenchment.

A propositional belief base ranked by entrenchment is revised with
maxi-adjustments as relevance feedback arrives; documents are accepted
when the consistent part of the base entails their keyword conjunction.

The sklearn wrapper lives in :mod:`entrench.estimator` and the HTTP API
in :mod:`entrench.server`; neither is imported here to keep the core
import light.
"""

from .agent import (
    AgentProfile,
    Document,
    ProfileError,
    Verdict,
    explain,
    filter_document,
    learn,
    load_profile,
    make_profile,
    parse_corpus,
    save_profile,
)
from .classifier import (
    ClassifierConfig,
    ClassifierError,
    KeywordStats,
    induce_belief,
    preference,
    update_stats,
)
from .logic import (
    ParseError,
    entails,
    is_consistent,
    parse_formula,
    parse_sentence,
    render,
)
from .ranking import (
    AdjustmentReport,
    EntrenchmentRanking,
    ProtectedConflictError,
    RankingError,
    Violation,
)

__version__ = "0.1.0"

__all__ = [
    "AdjustmentReport",
    "AgentProfile",
    "ClassifierConfig",
    "ClassifierError",
    "Document",
    "EntrenchmentRanking",
    "KeywordStats",
    "ParseError",
    "ProfileError",
    "ProtectedConflictError",
    "RankingError",
    "Verdict",
    "Violation",
    "entails",
    "explain",
    "filter_document",
    "induce_belief",
    "is_consistent",
    "learn",
    "load_profile",
    "make_profile",
    "parse_corpus",
    "parse_formula",
    "parse_sentence",
    "preference",
    "render",
    "save_profile",
    "update_stats",
    "__version__",
]
