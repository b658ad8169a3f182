"""Finite partial entrenchment rankings and their transmutations.

A ranking maps finitely many sentences to (0, 1]; the rank of a sentence
is the degree of firmness with which it is accepted.  Revision and
contraction are carried out by maxi-adjustment: the absolute minimal
change that gives the target sentence the requested rank while touching
as few other sentences as possible.  Universal rules stay in the base as
schema entries and are instantiated over the ranking's constant pool
whenever entailment is consulted, so a rule only starts interacting with
an individual once that individual is actually adopted into the base.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Sequence

from .logic import (
    And,
    Atom,
    Formula,
    Implies,
    Not,
    ParseError,
    Schema,
    Sentence,
    constants_of,
    entails,
    ground_schema,
    is_consistent,
    minimal_entailing_supersets,
    parse_sentence,
    render,
)

RANK_EPS = 1e-9
TOP = 1.0


class RankingError(ValueError):
    """A transmutation or constructor precondition was violated."""


class ProtectedConflictError(RankingError):
    """An operation would have to lower a protected sentence."""


def quantize(rank: float) -> float:
    """Snap a rank to its 3-decimal serialized value."""
    return float(format_rank(rank))


def format_rank(rank: float) -> str:
    return f"{rank:.3f}"


def _gt(a: float, b: float) -> bool:
    return a > b + RANK_EPS


def _eq(a: float, b: float) -> bool:
    return abs(a - b) <= RANK_EPS


# ---------------------------------------------------------------------------
# Schema translation
# ---------------------------------------------------------------------------
#
# For entailment purposes a schema is the conjunction of a private marker
# atom and its ground instances over the constant pool.  The marker keeps
# the schema a unit: with an empty pool the schema is inert rather than
# vacuously true, and no cut can "prove" a schema it does not contain.

_MARKER_PRED = "\x00rule"


@lru_cache(maxsize=None)
def _translate(sentence: Sentence, pool: frozenset[str]) -> Formula:
    if not isinstance(sentence, Schema):
        return sentence
    marker = Atom(_MARKER_PRED, render(sentence))
    result: Formula = marker
    if pool:
        for instance in sorted(ground_schema(sentence, pool), key=render):
            result = And(result, instance)
    return result


@dataclass(frozen=True)
class RankChange:
    sentence: Sentence
    before: float
    after: float


@dataclass(frozen=True)
class AdjustmentReport:
    """Faithful diff of one transmutation (applying it replays the change)."""

    operation: str
    target: str
    rank: float
    changes: tuple[RankChange, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def removed(self) -> tuple[Sentence, ...]:
        return tuple(c.sentence for c in self.changes if c.after <= RANK_EPS)

    @property
    def raised(self) -> tuple[Sentence, ...]:
        return tuple(c.sentence for c in self.changes if c.after > c.before)

    def apply_to(self, ranking: "EntrenchmentRanking") -> "EntrenchmentRanking":
        entries = dict(ranking._entries)
        for change in self.changes:
            sentence = change.sentence
            if change.after <= RANK_EPS:
                entries.pop(sentence, None)
            else:
                entries[sentence] = change.after
        return EntrenchmentRanking(
            entries, protected=ranking.protected, constants=ranking.constants
        )

    def to_dict(self) -> dict:
        # Ranks are quantized exactly like belief-base lines so that a
        # persisted history folds to the persisted ranking bit-for-bit.
        return {
            "operation": self.operation,
            "target": self.target,
            "rank": quantize(self.rank),
            "changes": [
                {
                    "sentence": render(c.sentence),
                    "before": quantize(c.before),
                    "after": quantize(c.after),
                }
                for c in self.changes
            ],
            "notes": list(self.notes),
        }

    @staticmethod
    def from_dict(payload: Mapping) -> "AdjustmentReport":
        return AdjustmentReport(
            operation=payload["operation"],
            target=payload["target"],
            rank=payload["rank"],
            changes=tuple(
                RankChange(parse_sentence(c["sentence"]), c["before"], c["after"])
                for c in payload["changes"]
            ),
            notes=tuple(payload.get("notes", ())),
        )


@dataclass(frozen=True)
class Violation:
    condition: str  # "PER1" | "PER2" | "PER3" | "CONSISTENCY"
    severity: str  # "violation" | "warning"
    message: str
    witnesses: tuple[str, ...] = ()


class EntrenchmentRanking:
    """Immutable finite partial entrenchment ranking.

    Entries with rank 0 are never stored (a sentence outside the mapping
    simply has rank 0).  All operations return fresh rankings.
    """

    __slots__ = ("_entries", "protected", "constants")

    def __init__(
        self,
        entries: Mapping[Sentence, float] | Iterable[tuple[Sentence, float]] = (),
        *,
        protected: Iterable[Sentence] = (),
        constants: Iterable[str] = (),
    ):
        items = entries.items() if isinstance(entries, Mapping) else entries
        kept: dict[Sentence, float] = {}
        for sentence, rank in items:
            if rank < -RANK_EPS or _gt(rank, TOP):
                raise RankingError(
                    f"rank {rank!r} outside [0, 1] for {render(sentence)}"
                )
            if rank > RANK_EPS:
                kept[sentence] = min(rank, TOP)
        self._entries: dict[Sentence, float] = kept
        self.protected: frozenset[Sentence] = frozenset(protected)
        self.constants: frozenset[str] = frozenset(constants)

    # -- basic access --------------------------------------------------

    def rank(self, sentence: Sentence) -> float:
        return self._entries.get(sentence, 0.0)

    def __contains__(self, sentence: Sentence) -> bool:
        return sentence in self._entries

    def __len__(self) -> int:
        return len(self._entries)

    def __iter__(self) -> Iterator[Sentence]:
        return iter(self.sentences())

    def __eq__(self, other) -> bool:
        if not isinstance(other, EntrenchmentRanking):
            return NotImplemented
        return (
            self._entries == other._entries
            and self.protected == other.protected
            and self.constants == other.constants
        )

    def __repr__(self) -> str:
        rows = ", ".join(
            f"{render(s)}: {format_rank(r)}" for s, r in self.items()
        )
        return f"EntrenchmentRanking({{{rows}}})"

    def sentences(self) -> list[Sentence]:
        """Entries sorted by rank descending, then canonical text."""
        return sorted(self._entries, key=lambda s: (-self._entries[s], render(s)))

    def items(self) -> list[tuple[Sentence, float]]:
        return [(s, self._entries[s]) for s in self.sentences()]

    def is_protected(self, sentence: Sentence) -> bool:
        return sentence in self.protected

    def pool(self) -> frozenset[str]:
        """Constants available for schema instantiation."""
        out = set(self.constants)
        for sentence in self._entries:
            out |= constants_of(sentence)
        return frozenset(out)

    def levels(self) -> list[float]:
        """Distinct ranks present, descending (ranks within 1e-9 merge)."""
        merged: list[float] = []
        for rank in sorted(self._entries.values(), reverse=True):
            if not merged or not _eq(merged[-1], rank):
                merged.append(rank)
        return merged

    def cut(self, rank: float) -> list[Sentence]:
        """Entries with rank >= the given value, canonical order."""
        return [s for s in self.sentences() if self._entries[s] >= rank - RANK_EPS]

    def _premises(
        self, sentences: Iterable[Sentence], pool: frozenset[str]
    ) -> list[Formula]:
        return [_translate(s, pool) for s in sentences]

    # -- degree / inconsistency ----------------------------------------

    def degree(self, sentence: Sentence, *, extra_constants: Iterable[str] = ()) -> float:
        """Largest rank whose cut entails the sentence (0 when unaccepted)."""
        pool = self.pool() | frozenset(extra_constants)
        goal = _translate(sentence, pool)
        return self._degree_of(goal, pool)

    def _degree_of(self, goal: Formula, pool: frozenset[str]) -> float:
        if entails((), goal):
            return TOP
        if not is_consistent((goal,)):
            return 0.0
        for level in self.levels():
            if entails(self._premises(self.cut(level), pool), goal):
                return level
        return 0.0

    def inconsistency_degree(self, *, extra_constants: Iterable[str] = ()) -> float:
        """Largest rank whose cut is inconsistent; 0 for a consistent base."""
        pool = self.pool() | frozenset(extra_constants)
        for level in self.levels():
            if not is_consistent(self._premises(self.cut(level), pool)):
                return level
        return 0.0

    def consistent_cut(self, *, extra_constants: Iterable[str] = ()) -> list[Sentence]:
        """Entries strictly above the inconsistency degree (always consistent)."""
        incons = self.inconsistency_degree(extra_constants=extra_constants)
        return [s for s, r in self.items() if _gt(r, incons)]

    # -- validation ------------------------------------------------------

    def validate(self, mode: str = "paper") -> list[Violation]:
        """Check the partial entrenchment conditions; never raises."""
        if mode not in ("strict", "paper"):
            raise RankingError(f"unknown validation mode {mode!r}")
        pool = self.pool()
        out: list[Violation] = []
        for sentence, rank in self.items():
            text = render(sentence)
            goal = _translate(sentence, pool)
            tautological = entails((), goal)
            upper = [s for s, r in self.items() if _gt(r, rank)]
            if not tautological and entails(self._premises(upper, pool), goal):
                out.append(Violation(
                    "PER1", "violation",
                    f"strictly more entrenched sentences already entail {text}",
                    (text,),
                ))
            if not is_consistent((goal,)):
                out.append(Violation(
                    "PER2", "violation",
                    f"contradiction held with positive rank: {text}", (text,),
                ))
            if tautological and not _eq(rank, TOP):
                out.append(Violation(
                    "PER3", "violation",
                    f"tautology ranked below 1: {text}", (text,),
                ))
            if _eq(rank, TOP) and not entails((), goal):
                if mode == "strict":
                    out.append(Violation(
                        "PER3", "violation",
                        f"contingent sentence at rank 1 (strict mode): {text}",
                        (text,),
                    ))
                elif not self.is_protected(sentence):
                    out.append(Violation(
                        "PER3", "violation",
                        f"contingent sentence at rank 1 is not protected: {text}",
                        (text,),
                    ))
        incons = self.inconsistency_degree()
        if incons > RANK_EPS:
            out.append(Violation(
                "CONSISTENCY", "warning",
                f"exp(B) is inconsistent from rank {format_rank(incons)} down",
            ))
        return out

    # -- transmutations ---------------------------------------------------

    def _check_target(self, sentence: Sentence, pool: frozenset[str]) -> Formula:
        goal = _translate(sentence, pool)
        if entails((), goal):
            raise RankingError(f"target is a tautology: {render(sentence)}")
        if not is_consistent((goal,)):
            raise RankingError(f"target is a contradiction: {render(sentence)}")
        return goal

    def _check_rank(self, rank: float, sentence: Sentence, mode: str, protected: bool) -> None:
        if rank < -RANK_EPS or _gt(rank, TOP):
            raise RankingError(f"rank {rank!r} outside [0, 1]")
        if _eq(rank, TOP):
            if mode != "paper" or not (protected or self.is_protected(sentence)):
                raise RankingError(
                    "rank 1 is reserved for tautologies"
                    " (protected sentences only in paper mode)"
                )

    def expand(
        self,
        sentence: Sentence,
        rank: float,
        *,
        protected: bool = False,
        mode: str = "paper",
    ) -> tuple["EntrenchmentRanking", AdjustmentReport]:
        """Definition-style expansion: adopt ``sentence`` at ``rank``.

        Entries above the new rank are untouched; entries at or below it
        rise to the degree that the expanded base already forces on them.
        """
        pool = self.pool()
        self._check_target(sentence, pool)
        self._check_rank(rank, sentence, mode, protected)
        target_f = _translate(sentence, pool)

        entries: dict[Sentence, float] = {}
        changes: list[RankChange] = []
        notes: list[str] = []
        domain = list(self._entries)
        if sentence not in self._entries:
            domain.append(sentence)
        for beta in domain:
            old = self.rank(beta)
            beta_f = _translate(beta, pool)
            if _gt(old, rank):
                new = old
            elif self._equivalent(target_f, beta_f):
                new = rank
            else:
                implied = self._degree_of(Implies(target_f, beta_f), pool)
                new = rank if _gt(implied, rank) else implied
                if _gt(new, old) and not _eq(new, rank):
                    notes.append(
                        f"raised {render(beta)} to {format_rank(new)}"
                        f" = degree({render(sentence)} -> {render(beta)})"
                    )
            if new > RANK_EPS:
                entries[beta] = new
            if not _eq(new, old):
                changes.append(RankChange(beta, old, new))

        new_protected = set(self.protected)
        if protected:
            new_protected.add(sentence)
        result = EntrenchmentRanking(
            entries, protected=new_protected, constants=self.constants
        )
        changes.sort(key=lambda c: render(c.sentence))
        report = AdjustmentReport(
            "expand", render(sentence), rank, tuple(changes), tuple(notes)
        )
        return result, report

    @staticmethod
    def _equivalent(left: Formula, right: Formula) -> bool:
        return entails((left,), right) and entails((right,), left)

    def contract(
        self, sentence: Sentence, rank: float = 0.0, *, mode: str = "paper"
    ) -> tuple["EntrenchmentRanking", AdjustmentReport]:
        """Lower the degree of ``sentence`` to ``rank`` (0 = withdraw)."""
        if rank < -RANK_EPS:
            raise RankingError(f"rank {rank!r} outside [0, 1]")
        pool = self.pool()
        goal = self._check_target(sentence, pool)
        if self.is_protected(sentence) and not _eq(rank, TOP):
            raise ProtectedConflictError(
                f"cannot contract protected sentence {render(sentence)}"
            )
        entries, changes, notes = self._contract_goal(goal, rank, pool)
        result = EntrenchmentRanking(
            entries, protected=self.protected, constants=self.constants
        )
        report = AdjustmentReport(
            "contract", render(sentence), rank, tuple(changes), tuple(notes)
        )
        return result, report

    def _contract_goal(
        self, goal: Formula, floor: float, pool: frozenset[str]
    ) -> tuple[dict[Sentence, float], list[RankChange], list[str]]:
        """Shared level sweep behind contraction (and embedded revision)."""
        degree = self._degree_of(goal, pool)
        new_ranks = dict(self._entries)
        changes: list[RankChange] = []
        notes: list[str] = []
        swept: dict[Sentence, float] = {}
        if degree <= floor + RANK_EPS:
            return new_ranks, changes, notes

        for level in self.levels():
            if _gt(level, degree) or not _gt(level, floor):
                continue
            level_set = sorted(
                (s for s, r in self._entries.items() if _eq(r, level)),
                key=render,
            )
            kept = [s for s, r in new_ranks.items() if _gt(r, level)]
            kept_premises = self._premises(kept, pool)
            forced = [
                s for s in level_set
                if not entails((), _translate(s, pool))
                and entails((goal,), _translate(s, pool))
            ]
            for s in forced:
                if self.is_protected(s):
                    raise ProtectedConflictError(
                        f"contraction would lower protected sentence {render(s)}"
                    )
            translation = {_translate(s, pool): s for s in level_set}
            gammas = minimal_entailing_supersets(
                kept_premises, sorted(translation, key=render), goal
            )
            if any(not gamma for gamma in gammas):
                raise RankingError(
                    "internal error: kept sentences already entail the goal"
                )
            families = [frozenset(translation[f] for f in gamma) for gamma in gammas]
            for gamma in families:
                if gamma <= self.protected:
                    raise ProtectedConflictError(
                        "contraction blocked: protected sentences "
                        f"{{{', '.join(sorted(render(s) for s in gamma))}}} "
                        "suffice to re-derive the target"
                    )
            unhit = [g for g in families if not (g & set(forced))]
            hit = self._min_hitting_set(
                [frozenset(s for s in g if not self.is_protected(s)) for g in unhit]
            )
            dropped = sorted(set(forced) | hit, key=render)
            if dropped:
                if families:
                    notes.append(
                        f"level {format_rank(level)}: minimal re-deriving subsets "
                        + "; ".join(
                            "{" + ", ".join(sorted(render(s) for s in g)) + "}"
                            for g in families
                        )
                    )
                for s in dropped:
                    swept[s] = new_ranks[s]
                    if floor > RANK_EPS:
                        new_ranks[s] = floor
                    else:
                        del new_ranks[s]

        # A swept sentence that the surviving base still entails keeps its
        # supported level: lowering it further would misstate its degree
        # and break the entrenchment conditions for the stored mapping.
        kept_items = [(s, r) for s, r in new_ranks.items() if s not in swept]
        support_levels = sorted(
            {r for _, r in kept_items if _gt(r, floor)}, reverse=True
        )
        for s, original in swept.items():
            target_f = _translate(s, pool)
            for j in support_levels:
                premises = [
                    _translate(k, pool) for k, r in kept_items if r >= j - RANK_EPS
                ]
                if entails(premises, target_f):
                    new_ranks[s] = j
                    notes.append(
                        f"kept {render(s)} at {format_rank(j)}:"
                        " remaining beliefs still entail it"
                    )
                    break
            after = new_ranks.get(s, 0.0)
            if not _eq(after, original):
                changes.append(RankChange(s, original, after))
        return new_ranks, changes, notes

    @staticmethod
    def _min_hitting_set(
        families: Sequence[frozenset[Sentence]],
    ) -> frozenset[Sentence]:
        """Smallest set meeting every family; ties break on canonical text."""
        families = [g for g in families if g]
        if not families:
            return frozenset()
        candidates = sorted(set().union(*families), key=render)
        for size in range(1, len(candidates) + 1):
            for combo in itertools.combinations(candidates, size):
                chosen = frozenset(combo)
                if all(chosen & g for g in families):
                    return chosen
        raise RankingError("internal error: no hitting set exists")

    def maxi_adjust(
        self, sentence: Sentence, rank: float, *, mode: str = "paper"
    ) -> tuple["EntrenchmentRanking", AdjustmentReport]:
        """Maxi-adjustment: give ``sentence`` exactly degree ``rank``.

        Ranks at or below the current degree contract; anything higher
        first withdraws the negation, then expands — so a single call
        also flips the polarity of a held belief.
        """
        pool = self.pool()
        goal = self._check_target(sentence, pool)
        self._check_rank(rank, sentence, mode, False)
        degree = self._degree_of(goal, pool)

        if rank <= degree + RANK_EPS:
            ranking, report = self.contract(sentence, rank, mode=mode)
            return ranking, AdjustmentReport(
                "maxi-adjust", report.target, rank, report.changes, report.notes
            )

        entries, changes, notes = self._contract_goal(Not(goal), 0.0, pool)
        if changes:
            notes.insert(0, f"withdrew !({render(sentence)}) before adoption")
        withdrawn = EntrenchmentRanking(
            entries, protected=self.protected, constants=self.constants
        )
        expanded, exp_report = withdrawn.expand(sentence, rank, mode=mode)

        net: dict[Sentence, tuple[float, float]] = {}
        for change in changes:
            net[change.sentence] = (change.before, change.after)
        for change in exp_report.changes:
            before = net.get(change.sentence, (change.before,))[0]
            net[change.sentence] = (before, change.after)
        merged = tuple(
            RankChange(s, before, after)
            for s, (before, after) in sorted(net.items(), key=lambda kv: render(kv[0]))
            if not _eq(before, after)
        )
        report = AdjustmentReport(
            "maxi-adjust", render(sentence), rank,
            merged, tuple(notes) + exp_report.notes,
        )
        return expanded, report

    def cr_contract(self, sentence: Sentence) -> "EntrenchmentRanking":
        """(C-) baseline: keep only entries strictly above degree(sentence)."""
        pool = self.pool()
        goal = self._check_target(sentence, pool)
        degree = self._degree_of(goal, pool)
        kept = {s: r for s, r in self._entries.items() if _gt(r, degree)}
        return EntrenchmentRanking(
            kept, protected=self.protected, constants=self.constants
        )


# ---------------------------------------------------------------------------
# Belief-base text format:  rank<TAB>flags<TAB>sentence
# ---------------------------------------------------------------------------

def dump_belief_lines(ranking: EntrenchmentRanking) -> list[str]:
    return [
        "\t".join((
            format_rank(rank),
            "P" if ranking.is_protected(sentence) else "-",
            render(sentence),
        ))
        for sentence, rank in ranking.items()
    ]


def dumps_beliefs(ranking: EntrenchmentRanking) -> str:
    return "".join(line + "\n" for line in dump_belief_lines(ranking))


def parse_belief_lines(
    lines: Iterable[str],
) -> tuple[list[tuple[Sentence, float]], list[Sentence]]:
    """Parse belief-base lines; returns (entries, protected sentences)."""
    entries: list[tuple[Sentence, float]] = []
    protected: list[Sentence] = []
    for number, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n")
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise ParseError(
                f"line {number}: expected rank<TAB>flags<TAB>sentence, got {line!r}"
            )
        rank_text, flags, sentence_text = parts
        try:
            rank = float(rank_text)
        except ValueError:
            raise ParseError(f"line {number}: bad rank {rank_text!r}") from None
        if rank < 0 or rank > 1:
            raise ParseError(f"line {number}: rank {rank_text} outside [0, 1]")
        unknown = set(flags) - {"P", "-"}
        if unknown or not flags:
            raise ParseError(f"line {number}: bad flags {flags!r}")
        try:
            sentence = parse_sentence(sentence_text)
        except ParseError as exc:
            raise ParseError(f"line {number}: {exc}") from None
        entries.append((sentence, rank))
        if "P" in flags:
            protected.append(sentence)
    return entries, protected


def loads_beliefs(
    text: str, *, constants: Iterable[str] = ()
) -> EntrenchmentRanking:
    entries, protected = parse_belief_lines(text.splitlines())
    return EntrenchmentRanking(entries, protected=protected, constants=constants)


def report_to_json(report: AdjustmentReport) -> str:
    return json.dumps(report.to_dict(), sort_keys=True, separators=(",", ":"))


def report_from_json(text: str) -> AdjustmentReport:
    return AdjustmentReport.from_dict(json.loads(text))
