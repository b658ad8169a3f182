"""scikit-learn façade over the filtering agent.

``RelevanceFilter`` lets the belief-revision pipeline sit inside ordinary
sklearn tooling: samples are keyword collections (or ``Document``
instances), labels are relevance judgments, and ``predict`` runs the
entailment filter.  Judgments are folded in input order — unlike most
estimators, refitting with a permuted corpus may converge to a different
belief base, which is inherent to iterated revision.
"""

from __future__ import annotations

from typing import Iterable, Sequence, Union

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.metrics import accuracy_score
from sklearn.utils.validation import check_is_fitted

from .agent import (
    AgentProfile,
    Document,
    Verdict,
    filter_document,
    learn,
    make_profile,
)
from .classifier import ClassifierConfig
from .logic import parse_sentence

Row = Union[Document, str, Iterable[str]]

_TRUE_LABELS = {True, 1, "1", "R", "r", "relevant", "true", "True"}
_FALSE_LABELS = {False, 0, "0", "N", "n", "nonrelevant", "false", "False"}


def coerce_documents(X: Iterable[Row]) -> list[Document]:
    """Normalize sample rows to Documents.

    A plain string is split on commas/whitespace (so ``"business"`` is one
    keyword, not eight characters); any other iterable is taken as the
    keyword collection itself.
    """
    docs: list[Document] = []
    for index, row in enumerate(X):
        if isinstance(row, Document):
            docs.append(row)
        elif isinstance(row, str):
            keywords = tuple(k for k in row.replace(",", " ").split() if k)
            docs.append(Document(f"x{index}", keywords))
        else:
            docs.append(Document(f"x{index}", tuple(row)))
    return docs


def coerce_labels(y, n_samples: int) -> list[bool]:
    labels = list(np.asarray(y, dtype=object).ravel()) if y is not None else None
    if labels is None or len(labels) != n_samples:
        raise ValueError(
            f"expected {n_samples} labels, got "
            f"{'none' if labels is None else len(labels)}"
        )
    out = []
    for label in labels:
        if isinstance(label, (np.bool_, np.integer)):
            label = label.item()
        if label in _TRUE_LABELS:
            out.append(True)
        elif label in _FALSE_LABELS:
            out.append(False)
        else:
            raise ValueError(f"unrecognized relevance label {label!r}")
    return out


class RelevanceFilter(ClassifierMixin, BaseEstimator):
    """Adaptive document filter with an sklearn estimator surface.

    Parameters
    ----------
    epsilon, neutrality, prior_relevance:
        Classifier constants: preference amplitude, neutral-band
        threshold and the assumed prior probability of relevance.
    mode:
        "paper" allows protected contingent sentences at rank 1;
        "strict" reserves rank 1 for tautologies.
    domain_knowledge:
        Iterable of ``(sentence, rank, protected)`` rows seeded into every
        fresh profile; sentences may be text or parsed objects.
    constants:
        Extra constants made available when grounding schema rows.
    """

    def __init__(
        self,
        *,
        epsilon: float = 0.9,
        neutrality: float = 0.5,
        prior_relevance: float = 0.5,
        mode: str = "paper",
        domain_knowledge: Sequence = (),
        constants: Sequence[str] = (),
    ):
        self.epsilon = epsilon
        self.neutrality = neutrality
        self.prior_relevance = prior_relevance
        self.mode = mode
        self.domain_knowledge = domain_knowledge
        self.constants = constants

    def __sklearn_tags__(self):
        tags = super().__sklearn_tags__()
        tags.input_tags.two_d_array = False
        tags.input_tags.string = True
        return tags

    # -- fitting --------------------------------------------------------

    def _fresh_profile(self) -> AgentProfile:
        rows = []
        for row in self.domain_knowledge:
            sentence, rank, *rest = row
            if isinstance(sentence, str):
                sentence = parse_sentence(sentence)
            rows.append((sentence, float(rank), bool(rest[0]) if rest else True))
        config = ClassifierConfig(
            epsilon=self.epsilon,
            neutrality=self.neutrality,
            prior_relevance=self.prior_relevance,
        )
        return make_profile(
            rows, config=config, mode=self.mode, constants=tuple(self.constants)
        )

    def fit(self, X, y) -> "RelevanceFilter":
        """Discard any previous state and learn the judgments in order."""
        self.profile_ = self._fresh_profile()
        self.classes_ = np.array([False, True])
        return self.partial_fit(X, y)

    def partial_fit(self, X, y) -> "RelevanceFilter":
        if not hasattr(self, "profile_"):
            self.profile_ = self._fresh_profile()
            self.classes_ = np.array([False, True])
        docs = coerce_documents(X)
        labels = coerce_labels(y, len(docs))
        profile = self.profile_
        for doc, label in zip(docs, labels):
            profile, _ = learn(profile, doc, label)
        self.profile_ = profile
        return self

    # -- inference ------------------------------------------------------

    def _verdicts(self, X) -> list[Verdict]:
        check_is_fitted(self, "profile_")
        return [filter_document(self.profile_, doc) for doc in coerce_documents(X)]

    def predict(self, X) -> np.ndarray:
        return np.array([v.relevant for v in self._verdicts(X)], dtype=bool)

    def decision_function(self, X) -> np.ndarray:
        """Margin degree − Incons: positive exactly for accepted documents."""
        return np.array(
            [v.degree - v.incons for v in self._verdicts(X)], dtype=float
        )

    def transform(self, X) -> np.ndarray:
        return self.decision_function(X).reshape(-1, 1)

    def score(self, X, y, sample_weight=None) -> float:
        # Accept the same label spellings as fit ("R"/"N", 0/1, ...);
        # the inherited accuracy would compare them raw against booleans.
        verdicts = self._verdicts(X)
        labels = coerce_labels(y, len(verdicts))
        return accuracy_score(
            labels, [v.relevant for v in verdicts], sample_weight=sample_weight
        )

    def explain(self, row: Row) -> Verdict:
        check_is_fitted(self, "profile_")
        return filter_document(self.profile_, coerce_documents([row])[0])
