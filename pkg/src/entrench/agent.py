"""Adaptive filtering agent: relevance feedback in, verdicts out.

A profile bundles the classifier statistics with an entrenchment
ranking.  Judging a document updates the statistics, recomputes the
preference of exactly the keywords that document mentions and folds any
changed beliefs into the ranking by maxi-adjustment.  Filtering asks
whether the consistent part of the ranking entails the document's
keyword conjunction — a nonmonotonic test that can flip in both
directions as feedback accumulates.
"""

from __future__ import annotations

import io
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence, Union

from .classifier import (
    ClassifierConfig,
    ClassifierError,
    KeywordStats,
    canonical_keyword,
    induce_belief,
    preference,
    update_stats,
)
from .logic import (
    And,
    Atom,
    Formula,
    ParseError,
    Sentence,
    constants_of,
    minimal_entailing_subset,
    parse_sentence,
    render,
)
from .ranking import (
    RANK_EPS,
    AdjustmentReport,
    EntrenchmentRanking,
    _translate,
    dump_belief_lines,
    format_rank,
    parse_belief_lines,
    report_from_json,
    report_to_json,
)

ADJUST_THRESHOLD = 1e-3  # induced-rank changes below this are ignored

RELEVANT = "R"
NONRELEVANT = "N"
UNJUDGED = "?"
_LABELS = (RELEVANT, NONRELEVANT, UNJUDGED)


class ProfileError(ValueError):
    """Raised when a profile file or directory is unusable."""


@dataclass(frozen=True)
class Document:
    """A keyword-characterised document, optionally labelled."""

    doc_id: str
    keywords: tuple[str, ...]
    label: str = UNJUDGED

    def __post_init__(self) -> None:
        if not self.doc_id or any(c in self.doc_id for c in "\t\n,"):
            raise ProfileError(f"bad document id {self.doc_id!r}")
        if self.label not in _LABELS:
            raise ProfileError(f"bad label {self.label!r} (use R, N or ?)")
        canonical = tuple(dict.fromkeys(canonical_keyword(k) for k in self.keywords))
        if not canonical:
            raise ProfileError(f"document {self.doc_id} has no keywords")
        object.__setattr__(self, "keywords", canonical)


@dataclass(frozen=True)
class Verdict:
    """Outcome of filtering one document against a profile."""

    relevant: bool
    degree: float
    premises: tuple[Sentence, ...]
    incons: float
    cut_size: int

    def to_dict(self) -> dict:
        return {
            "relevant": self.relevant,
            "degree": format_rank(self.degree),
            "premises": [render(p) for p in self.premises],
            "incons": format_rank(self.incons),
            "cut_size": self.cut_size,
        }


@dataclass(frozen=True)
class AgentProfile:
    """Immutable profile state; learning returns a new profile."""

    config: ClassifierConfig = ClassifierConfig()
    mode: str = "paper"
    stats: KeywordStats = KeywordStats()
    ranking: EntrenchmentRanking = EntrenchmentRanking()
    history: tuple[AdjustmentReport, ...] = ()

    def __post_init__(self) -> None:
        if self.mode not in ("paper", "strict"):
            raise ProfileError(f"unknown mode {self.mode!r}")


def make_profile(
    domain_knowledge: Iterable[tuple[Sentence, float, bool]] = (),
    *,
    config: ClassifierConfig = ClassifierConfig(),
    mode: str = "paper",
    constants: Iterable[str] = (),
) -> AgentProfile:
    """Fresh profile seeded with (sentence, rank, protected) rows."""
    entries = []
    protected = []
    for sentence, rank, is_protected in domain_knowledge:
        entries.append((sentence, rank))
        if is_protected:
            protected.append(sentence)
    ranking = EntrenchmentRanking(entries, protected=protected, constants=constants)
    return AgentProfile(config=config, mode=mode, ranking=ranking)


# ---------------------------------------------------------------------------
# Learning
# ---------------------------------------------------------------------------

def learn(
    profile: AgentProfile, document: Document, relevant: bool
) -> tuple[AgentProfile, list[AdjustmentReport]]:
    """Fold one relevance judgment into the profile.

    Preferences are recomputed for the document's keywords only; beliefs
    whose induced rank moved by at least ``ADJUST_THRESHOLD`` are
    maxi-adjusted — revisions most entrenched first, then withdrawals
    least entrenched first.  Raises without changing the profile if an
    adjustment collides with protected domain knowledge.
    """
    before = profile.stats
    after = update_stats(before, document.keywords, relevant)

    revisions: list[tuple[Formula, float]] = []
    withdrawals: list[Formula] = []
    for keyword in sorted(set(document.keywords)):
        seen_before = before.frequency(keyword) != (0, 0) and before.total > 0
        old = (
            induce_belief(keyword, preference(before, keyword, profile.config),
                          profile.config)
            if seen_before else None
        )
        new = induce_belief(
            keyword, preference(after, keyword, profile.config), profile.config
        )
        if new is None and old is None:
            continue
        if new is not None:
            if old is not None and old[0] == new[0] \
                    and abs(old[1] - new[1]) < ADJUST_THRESHOLD:
                continue
            revisions.append(new)
        elif profile.ranking.degree(old[0]) > RANK_EPS:
            withdrawals.append(old[0])

    revisions.sort(key=lambda item: (-item[1], render(item[0])))
    withdrawals.sort(key=lambda f: (profile.ranking.degree(f), render(f)))

    ranking = profile.ranking
    reports: list[AdjustmentReport] = []
    for formula, rank in revisions:
        ranking, report = ranking.maxi_adjust(formula, rank, mode=profile.mode)
        reports.append(report)
    for formula in withdrawals:
        if ranking.degree(formula) <= RANK_EPS:
            continue  # already withdrawn by an earlier adjustment
        ranking, report = ranking.maxi_adjust(formula, 0.0, mode=profile.mode)
        reports.append(report)

    updated = replace(
        profile, stats=after, ranking=ranking,
        history=profile.history + tuple(reports),
    )
    return updated, reports


# ---------------------------------------------------------------------------
# Filtering
# ---------------------------------------------------------------------------

Query = Union[Document, Sentence, str]


def _query_sentence(query: Query) -> Sentence:
    if isinstance(query, Document):
        atoms = [Atom("pkw", k) for k in sorted(set(query.keywords))]
        conjunction: Formula = atoms[0]
        for atom in atoms[1:]:
            conjunction = And(conjunction, atom)
        return conjunction
    if isinstance(query, str):
        return parse_sentence(query)
    return query


def filter_document(profile: AgentProfile, query: Query) -> Verdict:
    """Nontrivial entailment test against the consistent part of the base.

    A document passes when its degree strictly exceeds the inconsistency
    degree, i.e. when some uncompromised cut of the base entails it.
    """
    sentence = _query_sentence(query)
    extra = constants_of(sentence)
    ranking = profile.ranking
    degree = ranking.degree(sentence, extra_constants=extra)
    incons = ranking.inconsistency_degree(extra_constants=extra)
    cut = ranking.consistent_cut(extra_constants=extra)
    relevant = degree > incons + RANK_EPS

    premises: tuple[Sentence, ...] = ()
    if relevant:
        pool = ranking.pool() | extra
        translated = {_translate(s, pool): s for s in cut}
        goal = _translate(sentence, pool)
        core = minimal_entailing_subset(list(translated), goal)
        premises = tuple(translated[f] for f in core)
    return Verdict(relevant, degree, premises, incons, len(cut))


def explain(profile: AgentProfile, query: Query) -> Verdict:
    """Alias of :func:`filter_document`; the verdict carries diagnostics."""
    return filter_document(profile, query)


# ---------------------------------------------------------------------------
# Corpus files:  id<TAB>label<TAB>k1,k2,...
# ---------------------------------------------------------------------------

def parse_corpus(text: str) -> list[Document]:
    documents: list[Document] = []
    seen: set[str] = set()
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(
                f"line {number}: expected id<TAB>label<TAB>keywords, got {line!r}"
            )
        doc_id, label, keyword_field = (p.strip() for p in parts)
        if label not in _LABELS:
            raise ParseError(f"line {number}: bad label {label!r}")
        if doc_id in seen:
            raise ParseError(f"line {number}: duplicate document id {doc_id!r}")
        seen.add(doc_id)
        keywords = [k for k in (part.strip() for part in keyword_field.split(",")) if k]
        try:
            documents.append(Document(doc_id, tuple(keywords), label))
        except (ProfileError, ClassifierError) as exc:
            raise ParseError(f"line {number}: {exc}") from None
    return documents


def dump_corpus(documents: Iterable[Document]) -> str:
    return "".join(
        f"{d.doc_id}\t{d.label}\t{','.join(d.keywords)}\n" for d in documents
    )


# ---------------------------------------------------------------------------
# Profile persistence (one directory per profile)
# ---------------------------------------------------------------------------

PROFILE_FILE = "profile.tsv"
QUEUE_FILE = "queue.tsv"

_CONFIG_KEYS = ("mode", "epsilon", "lambda", "prel")


def dumps_profile(profile: AgentProfile) -> str:
    out = io.StringIO()
    out.write("[config]\n")
    out.write(f"mode\t{profile.mode}\n")
    out.write(f"epsilon\t{profile.config.epsilon!r}\n")
    out.write(f"lambda\t{profile.config.neutrality!r}\n")
    out.write(f"prel\t{profile.config.prior_relevance!r}\n")
    out.write("[constants]\n")
    for constant in sorted(profile.ranking.constants):
        out.write(constant + "\n")
    out.write("[stats]\n")
    out.write(f"@\t{profile.stats.relevant_docs}\t{profile.stats.nonrelevant_docs}\n")
    for keyword in profile.stats.keywords():
        df_rel, df_nrel = profile.stats.frequency(keyword)
        out.write(f"{keyword}\t{df_rel}\t{df_nrel}\n")
    out.write("[beliefs]\n")
    for line in dump_belief_lines(profile.ranking):
        out.write(line + "\n")
    out.write("[history]\n")
    for report in profile.history:
        out.write(report_to_json(report) + "\n")
    return out.getvalue()


def loads_profile(text: str) -> AgentProfile:
    sections: dict[str, list[str]] = {}
    current: list[str] | None = None
    for number, line in enumerate(text.splitlines(), start=1):
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1]
            if name in sections:
                raise ProfileError(f"line {number}: duplicate section {name!r}")
            if name not in ("config", "constants", "stats", "beliefs", "history"):
                raise ProfileError(f"line {number}: unknown section {name!r}")
            current = sections.setdefault(name, [])
            continue
        if not line.strip():
            continue
        if current is None:
            raise ProfileError(f"line {number}: content before any section")
        current.append(line)
    for required in ("config", "stats", "beliefs"):
        if required not in sections:
            raise ProfileError(f"missing [{required}] section")

    raw_config: dict[str, str] = {}
    for line in sections["config"]:
        key, _, value = line.partition("\t")
        if key not in _CONFIG_KEYS:
            raise ProfileError(f"unknown config key {key!r}")
        raw_config[key] = value
    try:
        config = ClassifierConfig(
            epsilon=float(raw_config.get("epsilon", 0.9)),
            neutrality=float(raw_config.get("lambda", 0.5)),
            prior_relevance=float(raw_config.get("prel", 0.5)),
        )
    except (ValueError, ClassifierError) as exc:
        raise ProfileError(f"bad config: {exc}") from None
    mode = raw_config.get("mode", "paper")

    counts: dict[str, tuple[int, int]] = {}
    dpos = dneg = 0
    saw_global = False
    for line in sections["stats"]:
        parts = line.split("\t")
        if len(parts) != 3:
            raise ProfileError(f"bad stats row {line!r}")
        name, rel_text, nrel_text = parts
        try:
            rel, nrel = int(rel_text), int(nrel_text)
        except ValueError:
            raise ProfileError(f"bad stats row {line!r}") from None
        if rel < 0 or nrel < 0:
            raise ProfileError(f"negative count in stats row {line!r}")
        if name == "@":
            dpos, dneg = rel, nrel
            saw_global = True
        else:
            counts[canonical_keyword(name)] = (rel, nrel)
    if not saw_global:
        raise ProfileError("stats section is missing its @ header record")
    for keyword, (rel, nrel) in counts.items():
        if rel > dpos or nrel > dneg:
            raise ProfileError(
                f"keyword {keyword!r} counted in more documents than were judged"
            )
    stats = KeywordStats(dpos, dneg, counts)

    try:
        entries, protected = parse_belief_lines(sections["beliefs"])
    except ParseError as exc:
        raise ProfileError(str(exc)) from None
    constants = tuple(c.strip() for c in sections.get("constants", ()) if c.strip())
    ranking = EntrenchmentRanking(entries, protected=protected, constants=constants)

    history = []
    for line in sections.get("history", ()):
        try:
            history.append(report_from_json(line))
        except (json.JSONDecodeError, KeyError, ParseError) as exc:
            raise ProfileError(f"bad history record: {exc}") from None

    profile = AgentProfile(
        config=config, mode=mode, stats=stats, ranking=ranking,
        history=tuple(history),
    )
    return profile


def save_profile(profile: AgentProfile, directory: Union[str, Path]) -> Path:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / PROFILE_FILE
    path.write_text(dumps_profile(profile), encoding="utf-8")
    return path


def load_profile(directory: Union[str, Path]) -> AgentProfile:
    path = Path(directory) / PROFILE_FILE
    if not path.is_file():
        raise FileNotFoundError(f"no profile at {path}")
    try:
        return loads_profile(path.read_text(encoding="utf-8"))
    except ProfileError as exc:
        raise ProfileError(f"{path}: {exc}") from None


def load_queue(directory: Union[str, Path]) -> list[Document]:
    path = Path(directory) / QUEUE_FILE
    if not path.is_file():
        return []
    return parse_corpus(path.read_text(encoding="utf-8"))


def save_queue(documents: Sequence[Document], directory: Union[str, Path]) -> None:
    path = Path(directory) / QUEUE_FILE
    path.write_text(dump_corpus(documents), encoding="utf-8")


def enqueue(
    documents: Sequence[Document], new_docs: Iterable[Document]
) -> list[Document]:
    """Stable-order queue merge; at most one pending entry per id."""
    queue = list(documents)
    known = {d.doc_id for d in queue}
    for doc in new_docs:
        if doc.doc_id not in known:
            queue.append(replace(doc, label=UNJUDGED))
            known.add(doc.doc_id)
    return queue


def dequeue(documents: Sequence[Document], doc_id: str) -> list[Document]:
    return [d for d in documents if d.doc_id != doc_id]
