"""Keyword preference learning from relevance feedback.

Each judged document updates per-keyword document frequencies; the
preference of a keyword combines how often it has been seen (scaled by
corpus size) with how strongly its relevance odds deviate from the
prior.  Preferences above the neutrality threshold induce entrenchment
ranks for ``pkw(keyword)`` (or its negation, for negative preferences).
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping

from .logic import Atom, Formula, Not

_KEYWORD_RE = re.compile(r"\S+\Z")


class ClassifierError(ValueError):
    """Raised for malformed keywords or unusable statistics."""


def canonical_keyword(raw: str) -> str:
    keyword = raw.strip().lower()
    if not keyword or not _KEYWORD_RE.match(keyword):
        raise ClassifierError(f"bad keyword {raw!r}")
    return keyword


@dataclass(frozen=True)
class ClassifierConfig:
    """Preference parameters (defaults reproduce the reference tables)."""

    epsilon: float = 0.9          # ceiling on |preference|
    neutrality: float = 0.5       # belief induced only when |pre| >= this
    prior_relevance: float = 0.5  # prior probability that a document is relevant

    def __post_init__(self) -> None:
        if not 0 < self.epsilon <= 1:
            raise ClassifierError(f"epsilon {self.epsilon!r} outside (0, 1]")
        if not 0 < self.neutrality < 1:
            raise ClassifierError(f"lambda {self.neutrality!r} outside (0, 1)")
        if not 0 < self.prior_relevance < 1:
            raise ClassifierError(f"prel {self.prior_relevance!r} outside (0, 1)")


@dataclass(frozen=True)
class KeywordStats:
    """Document-frequency counters accumulated from judged documents."""

    relevant_docs: int = 0
    nonrelevant_docs: int = 0
    counts: Mapping[str, tuple[int, int]] = field(default_factory=dict)

    @property
    def total(self) -> int:
        return self.relevant_docs + self.nonrelevant_docs

    def frequency(self, keyword: str) -> tuple[int, int]:
        return self.counts.get(keyword, (0, 0))

    def keywords(self) -> list[str]:
        return sorted(self.counts)


def update_stats(
    stats: KeywordStats, keywords: Iterable[str], relevant: bool
) -> KeywordStats:
    """Count one judged document; every distinct keyword ticks once."""
    distinct = {canonical_keyword(k) for k in keywords}
    if not distinct:
        raise ClassifierError("a judged document needs at least one keyword")
    counts = dict(stats.counts)
    for keyword in distinct:
        df_rel, df_nrel = counts.get(keyword, (0, 0))
        counts[keyword] = (
            (df_rel + 1, df_nrel) if relevant else (df_rel, df_nrel + 1)
        )
    return KeywordStats(
        relevant_docs=stats.relevant_docs + (1 if relevant else 0),
        nonrelevant_docs=stats.nonrelevant_docs + (0 if relevant else 1),
        counts=counts,
    )


def scaling_breadth(total_docs: int) -> int:
    """Order-of-magnitude damping factor for document frequencies."""
    return int(math.log10(total_docs) + 1)


def preference(
    stats: KeywordStats, keyword: str, config: ClassifierConfig = ClassifierConfig()
) -> float:
    """Signed preference in (-epsilon, epsilon); positive favours relevance."""
    keyword = canonical_keyword(keyword)
    if stats.total == 0:
        raise ClassifierError("no judged documents yet")
    df_rel, df_nrel = stats.frequency(keyword)
    df = df_rel + df_nrel
    if df == 0:
        raise ClassifierError(f"keyword never seen: {keyword!r}")
    breadth = scaling_breadth(stats.total)
    p = df_rel / df
    odds = p * math.tanh(p / config.prior_relevance) - (1 - p) * math.tanh(
        (1 - p) / (1 - config.prior_relevance)
    )
    return config.epsilon * math.tanh(df / breadth) * odds


def induce_belief(
    keyword: str, pre: float, config: ClassifierConfig = ClassifierConfig()
) -> tuple[Formula, float] | None:
    """Entrenchment target for a keyword, or None inside the neutral band."""
    if abs(pre) < config.neutrality:
        return None
    atom = Atom("pkw", canonical_keyword(keyword))
    return (atom if pre > 0 else Not(atom)), abs(pre)
