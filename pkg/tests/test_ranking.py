"""Entrenchment rankings: degree, transmutations, validation, file format."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from entrench.logic import Not, parse_sentence, render
from entrench.ranking import (
    AdjustmentReport,
    EntrenchmentRanking,
    ProtectedConflictError,
    RankingError,
    dumps_beliefs,
    loads_beliefs,
    report_from_json,
    report_to_json,
)
from tests.oracle import tt_entails

RULES = {
    "pkw(business) <-> pkw(commerce)": 1.0,
    "pkw(sculpture) -> pkw(art)": 1.0,
}


def ranking(rows, protected=(), constants=()):
    return EntrenchmentRanking(
        [(parse_sentence(text), rank) for text, rank in rows.items()],
        protected=[parse_sentence(t) for t in protected],
        constants=constants,
    )


def rows_of(r):
    return {render(s): round(rank, 9) for s, rank in r.items()}


def s(text):
    return parse_sentence(text)


@pytest.fixture
def art_rules_base():
    """Profile state before the negative art feedback arrives."""
    return ranking(
        {**RULES, "pkw(business)": 0.856, "!pkw(sculpture)": 0.785},
        protected=RULES,
    )


@pytest.fixture
def flip_base():
    """Profile state before sculpture documents start being relevant."""
    return ranking(
        {**RULES, "pkw(business)": 0.856, "!pkw(sculpture)": 0.856,
         "!pkw(art)": 0.856},
        protected=RULES,
    )


@pytest.fixture
def withdraw_base():
    """Profile state before business+sculpture documents turn non-relevant."""
    return ranking(
        {**RULES, "pkw(business)": 0.856, "pkw(sculpture)": 0.785},
        protected=RULES,
    )


@pytest.fixture
def tweety_base():
    return ranking({
        "forall x. penguin(x) -> bird(x)": 0.9,
        "forall x. penguin(x) -> !fly(x)": 0.7,
        "forall x. bird(x) -> fly(x)": 0.4,
    })


class TestDegree:
    def test_explicit_sentence(self, art_rules_base):
        assert art_rules_base.degree(s("pkw(business)")) == 0.856

    def test_implied_sentence_takes_weakest_premise(self, art_rules_base):
        # commerce follows from business + the biconditional
        assert art_rules_base.degree(s("pkw(commerce)")) == 0.856

    def test_rule_consequence_at_rank_one(self, art_rules_base):
        assert art_rules_base.degree(s("!pkw(art) -> !pkw(sculpture)")) == 1.0

    def test_unaccepted_sentence(self, art_rules_base):
        assert art_rules_base.degree(s("pkw(insurance)")) == 0.0

    def test_tautology(self, art_rules_base):
        assert art_rules_base.degree(s("pkw(art) | !pkw(art)")) == 1.0

    def test_contradiction(self, art_rules_base):
        assert art_rules_base.degree(s("pkw(art) & !pkw(art)")) == 0.0

    def test_empty_ranking(self):
        empty = EntrenchmentRanking()
        assert empty.degree(s("pkw(art)")) == 0.0
        assert empty.degree(s("pkw(art) | !pkw(art)")) == 1.0


class TestExpand:
    def test_chain_is_raised_to_preserve_ranking_shape(self):
        base = ranking({"p(a) -> q(a)": 0.9, "q(a)": 0.3})
        out, report = base.expand(s("p(a)"), 0.6)
        assert rows_of(out) == {"p(a) -> q(a)": 0.9, "p(a)": 0.6, "q(a)": 0.6}
        assert {render(c.sentence) for c in report.changes} == {"p(a)", "q(a)"}

    def test_expand_at_existing_degree_is_stable(self):
        base = ranking({"p(a) -> q(a)": 0.9, "q(a)": 0.3})
        out, _ = base.expand(s("q(a)"), 0.3)
        assert rows_of(out) == rows_of(base)

    def test_negative_feedback_expansion(self, art_rules_base):
        # adopting !pkw(art) drags the weaker !pkw(sculpture) up with it
        out, _ = art_rules_base.expand(s("!pkw(art)"), 0.856)
        assert rows_of(out) == {
            "pkw(business) <-> pkw(commerce)": 1.0,
            "pkw(sculpture) -> pkw(art)": 1.0,
            "pkw(business)": 0.856,
            "!pkw(sculpture)": 0.856,
            "!pkw(art)": 0.856,
        }

    def test_tautology_rejected(self, art_rules_base):
        with pytest.raises(RankingError):
            art_rules_base.expand(s("pkw(art) | !pkw(art)"), 0.5)

    def test_rank_one_needs_protection(self, art_rules_base):
        with pytest.raises(RankingError):
            art_rules_base.expand(s("pkw(web)"), 1.0)
        out, _ = art_rules_base.expand(s("pkw(web)"), 1.0, protected=True)
        assert out.rank(s("pkw(web)")) == 1.0
        with pytest.raises(RankingError):
            art_rules_base.expand(s("pkw(web)"), 1.0, protected=True, mode="strict")


class TestContract:
    def test_withdraw_removes_only_target(self, withdraw_base):
        out, _ = withdraw_base.contract(s("pkw(sculpture)"))
        assert rows_of(out) == {**{t: 1.0 for t in RULES}, "pkw(business)": 0.856}

    def test_contract_unheld_sentence_is_noop(self, withdraw_base):
        out, report = withdraw_base.contract(s("pkw(web)"))
        assert rows_of(out) == rows_of(withdraw_base)
        assert report.changes == ()

    def test_contract_above_degree_is_noop(self, withdraw_base):
        out, report = withdraw_base.contract(s("pkw(sculpture)"), 0.9)
        assert rows_of(out) == rows_of(withdraw_base)
        assert report.changes == ()

    def test_companion_in_minimal_subset_goes_too(self, flip_base):
        # {!pkw(art)} plus the protected rule re-derives !pkw(sculpture),
        # so withdrawing !pkw(sculpture) has to drop !pkw(art) as well.
        out, report = flip_base.contract(s("!pkw(sculpture)"))
        assert rows_of(out) == {
            **{t: 1.0 for t in RULES}, "pkw(business)": 0.856,
        }
        assert {render(c.sentence) for c in report.changes} == {
            "!pkw(sculpture)", "!pkw(art)",
        }
        assert any("minimal re-deriving subsets" in n for n in report.notes)

    def test_postcondition_nothing_above_floor_entails_target(self, flip_base):
        target = s("!pkw(sculpture)")
        out, _ = flip_base.contract(target, 0.3)
        survivors = [f for f, r in out.items() if r > 0.3]
        assert not tt_entails(survivors, target)
        assert out.degree(target) == pytest.approx(0.3)

    def test_protected_target_is_an_error(self, flip_base):
        with pytest.raises(ProtectedConflictError):
            flip_base.contract(s("pkw(sculpture) -> pkw(art)"))

    def test_protected_only_derivation_is_an_error(self):
        base = ranking({"p(a) -> q(a)": 1.0, "q(a)": 0.5},
                       protected=["p(a) -> q(a)", ])
        base, _ = base.expand(s("p(a)"), 1.0, protected=True)
        # q(a) is re-derivable from protected sentences alone
        with pytest.raises(ProtectedConflictError):
            base.contract(s("q(a)"))

    def test_min_hitting_set_prefers_fewest_and_lexicographic(self):
        # Both b(x) and c(x) are needed to re-derive the target, so one
        # of them (the lexicographically first) is enough to drop.
        base = ranking({"b(x) -> c(x) -> a(x)": 0.9, "a(x)": 0.5,
                        "b(x)": 0.5, "c(x)": 0.5})
        out, _ = base.contract(s("a(x)"))
        assert rows_of(out) == {"b(x) -> c(x) -> a(x)": 0.9, "c(x)": 0.5}


class TestMaxiAdjust:
    def test_negative_art_feedback(self, art_rules_base):
        """Adopting !pkw(art) at 0.856 lifts !pkw(sculpture) to match."""
        out, report = art_rules_base.maxi_adjust(s("!pkw(art)"), 0.856)
        assert rows_of(out) == {
            "pkw(business) <-> pkw(commerce)": 1.0,
            "pkw(sculpture) -> pkw(art)": 1.0,
            "pkw(business)": 0.856,
            "!pkw(sculpture)": 0.856,
            "!pkw(art)": 0.856,
        }
        assert report.operation == "maxi-adjust"
        assert report.apply_to(art_rules_base) == out

    def test_polarity_flip(self, flip_base):
        """One call adopts pkw(sculpture), withdrawing both negatives."""
        out, report = flip_base.maxi_adjust(s("pkw(sculpture)"), 0.785)
        assert rows_of(out) == {
            "pkw(business) <-> pkw(commerce)": 1.0,
            "pkw(sculpture) -> pkw(art)": 1.0,
            "pkw(business)": 0.856,
            "pkw(sculpture)": 0.785,
        }
        gone = {render(c.sentence) for c in report.changes if c.after == 0}
        assert gone == {"!pkw(sculpture)", "!pkw(art)"}
        assert report.apply_to(flip_base) == out

    def test_withdrawals_least_entrenched_first(self, withdraw_base):
        """Both keyword beliefs withdraw; rules alone remain."""
        step1, _ = withdraw_base.maxi_adjust(s("pkw(sculpture)"), 0.0)
        out, _ = step1.maxi_adjust(s("pkw(business)"), 0.0)
        assert rows_of(out) == {t: 1.0 for t in RULES}

    def test_equal_rank_routes_to_contraction(self, withdraw_base):
        out, _ = withdraw_base.maxi_adjust(s("pkw(sculpture)"), 0.785)
        assert rows_of(out) == rows_of(withdraw_base)

    def test_degree_after_adjustment_is_requested_rank(self, flip_base):
        out, _ = flip_base.maxi_adjust(s("pkw(sculpture)"), 0.785)
        assert out.degree(s("pkw(sculpture)")) == pytest.approx(0.785)
        out2, _ = flip_base.maxi_adjust(s("!pkw(sculpture)"), 0.3)
        assert out2.degree(s("!pkw(sculpture)")) == pytest.approx(0.3)

    def test_idempotent(self, flip_base):
        once, _ = flip_base.maxi_adjust(s("pkw(sculpture)"), 0.785)
        twice, report = once.maxi_adjust(s("pkw(sculpture)"), 0.785)
        assert rows_of(twice) == rows_of(once)
        assert report.changes == ()


class TestTweety:
    def test_revision_leaves_rules_in_place(self, tweety_base):
        out, _ = tweety_base.maxi_adjust(s("penguin(tweety)"), 0.8)
        assert rows_of(out) == {
            "forall x. penguin(x) -> bird(x)": 0.9,
            "penguin(tweety)": 0.8,
            "forall x. penguin(x) -> !fly(x)": 0.7,
            "forall x. bird(x) -> fly(x)": 0.4,
        }

    def test_competing_conclusions(self, tweety_base):
        out, _ = tweety_base.maxi_adjust(s("penguin(tweety)"), 0.8)
        assert out.degree(s("!fly(tweety)")) == pytest.approx(0.7)
        assert out.degree(s("fly(tweety)")) == pytest.approx(0.4)

    def test_inconsistency_is_detected_not_eliminated(self, tweety_base):
        out, _ = tweety_base.maxi_adjust(s("penguin(tweety)"), 0.8)
        assert out.inconsistency_degree() == pytest.approx(0.4)
        cut = out.consistent_cut()
        assert {render(x) for x in cut} == {
            "forall x. penguin(x) -> bird(x)",
            "penguin(tweety)",
            "forall x. penguin(x) -> !fly(x)",
        }

    def test_cut_supports_the_cautious_conclusion(self, tweety_base):
        out, _ = tweety_base.maxi_adjust(s("penguin(tweety)"), 0.8)
        pool = out.pool()
        assert "tweety" in pool
        assert out.degree(s("bird(tweety)")) == pytest.approx(0.8)


class TestInconsistencyDegree:
    def test_consistent_base(self, art_rules_base):
        assert art_rules_base.inconsistency_degree() == 0.0
        assert art_rules_base.consistent_cut() == art_rules_base.sentences()

    def test_two_level_conflict(self):
        base = ranking({"p(a)": 0.7, "!p(a)": 0.3, "q(a)": 0.5})
        assert base.inconsistency_degree() == pytest.approx(0.3)
        assert {render(x) for x in base.consistent_cut()} == {"p(a)", "q(a)"}

    def test_same_level_conflict_is_a_warning_not_per1(self):
        base = ranking({"p(a)": 0.5, "!p(a)": 0.5})
        assert base.inconsistency_degree() == pytest.approx(0.5)
        problems = base.validate()
        assert [v.condition for v in problems] == ["CONSISTENCY"]
        assert problems[0].severity == "warning"


class TestCRBaseline:
    def test_baseline_contraction_is_drastic(self):
        base = ranking({"pkw(business)": 0.9, "pkw(commerce)": 0.8,
                        "pkw(sculpture)": 0.7, "pkw(art)": 0.6})
        out = base.cr_contract(s("pkw(business)"))
        assert rows_of(out) == {}
        revised, _ = out.expand(s("!pkw(business)"), 0.9)
        assert rows_of(revised) == {"!pkw(business)": 0.9}

    def test_maxi_adjustment_keeps_unrelated_beliefs(self):
        base = ranking({"pkw(business)": 0.9, "pkw(commerce)": 0.8,
                        "pkw(sculpture)": 0.7, "pkw(art)": 0.6})
        out, _ = base.maxi_adjust(s("!pkw(business)"), 0.9)
        assert rows_of(out) == {"!pkw(business)": 0.9, "pkw(commerce)": 0.8,
                                "pkw(sculpture)": 0.7, "pkw(art)": 0.6}


class TestValidate:
    def test_clean_base(self, art_rules_base):
        assert art_rules_base.validate() == []

    def test_per1_violation(self):
        base = ranking({"p(a)": 0.9, "p(a) | q(a)": 0.5})
        conditions = [v.condition for v in base.validate()]
        assert "PER1" in conditions

    def test_per2_violation(self):
        base = ranking({"p(a) & !p(a)": 0.4})
        assert [v.condition for v in base.validate()] == ["PER2", "CONSISTENCY"]

    def test_per3_tautology_below_top(self):
        base = ranking({"p(a) | !p(a)": 0.9})
        assert [v.condition for v in base.validate()] == ["PER3"]

    def test_per3_modes_for_contingent_rank_one(self):
        base = ranking({"pkw(sculpture) -> pkw(art)": 1.0},
                       protected=["pkw(sculpture) -> pkw(art)"])
        assert base.validate("paper") == []
        strict = base.validate("strict")
        assert [v.condition for v in strict] == ["PER3"]
        unprotected = ranking({"pkw(sculpture) -> pkw(art)": 1.0})
        assert [v.condition for v in unprotected.validate("paper")] == ["PER3"]

    def test_unknown_mode(self, art_rules_base):
        with pytest.raises(RankingError):
            art_rules_base.validate("fancy")


class TestFileFormat:
    def test_round_trip_bytes(self, flip_base):
        text = dumps_beliefs(flip_base)
        again = loads_beliefs(text)
        assert again == flip_base
        assert dumps_beliefs(again) == text

    def test_layout(self, withdraw_base):
        lines = dumps_beliefs(withdraw_base).splitlines()
        assert lines[0] == "1.000\tP\tpkw(business) <-> pkw(commerce)"
        assert lines[2] == "0.856\t-\tpkw(business)"

    def test_comments_and_blanks_ignored(self):
        text = "# header\n\n0.700\t-\tp(a)\n"
        assert rows_of(loads_beliefs(text)) == {"p(a)": 0.7}

    @pytest.mark.parametrize("bad", [
        "0.7\tp(a)",              # missing column
        "high\t-\tp(a)",          # bad rank
        "1.200\t-\tp(a)",         # out of range
        "0.700\tX\tp(a)",         # unknown flag
        "0.700\t-\tp(",           # bad formula
    ])
    def test_malformed_lines(self, bad):
        from entrench.logic import ParseError
        with pytest.raises(ParseError):
            loads_beliefs(bad + "\n")

    def test_report_json_round_trip(self, flip_base):
        _, report = flip_base.maxi_adjust(s("pkw(sculpture)"), 0.785)
        again = report_from_json(report_to_json(report))
        assert again == report
        assert again.apply_to(flip_base) == flip_base.maxi_adjust(
            s("pkw(sculpture)"), 0.785)[0]


# ---------------------------------------------------------------------------
# Randomized properties
# ---------------------------------------------------------------------------

_texts = [
    "p(a)", "!p(a)", "q(a)", "!q(a)", "r(a)", "!r(a)",
    "p(a) -> q(a)", "q(a) -> r(a)", "p(a) | q(a)", "p(a) & q(a)",
    "p(a) <-> q(a)", "!p(a) | r(a)",
]


def random_walk(seed, steps=4):
    rng = random.Random(seed)
    base = EntrenchmentRanking()
    for _ in range(steps):
        target = s(rng.choice(_texts))
        rank = rng.choice([0.0, 0.2, 0.4, 0.6, 0.8])
        try:
            base, _ = base.maxi_adjust(target, rank)
        except RankingError:
            continue
    return base


class TestProperties:
    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=150, deadline=None)
    def test_random_maxi_walks_preserve_per1(self, seed):
        base = random_walk(seed)
        assert all(v.condition != "PER1" for v in base.validate())

    @given(st.integers(min_value=0, max_value=10_000),
           st.sampled_from(_texts), st.sampled_from([0.0, 0.1, 0.3]))
    @settings(max_examples=150, deadline=None)
    def test_contraction_postcondition(self, seed, text, floor):
        base = random_walk(seed)
        target = s(text)
        try:
            out, _ = base.contract(target, floor)
        except RankingError:
            return
        survivors = [f for f, r in out.items() if r > floor + 1e-9]
        assert not tt_entails(survivors, target)

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=100, deadline=None)
    def test_contraction_never_adds_beliefs(self, seed):
        base = random_walk(seed)
        target = s(random.Random(seed ^ 0xBEEF).choice(_texts))
        try:
            out, _ = base.contract(target)
        except RankingError:
            return
        assert set(out.sentences()) <= set(base.sentences())

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=100, deadline=None)
    def test_entailment_never_outranks_consequence(self, seed):
        # if a single sentence entails another, its degree cannot exceed it
        base = random_walk(seed)
        rng = random.Random(seed ^ 0xC0FFEE)
        alpha, beta = s(rng.choice(_texts)), s(rng.choice(_texts))
        if tt_entails([alpha], beta):
            assert base.degree(alpha) <= base.degree(beta) + 1e-9
