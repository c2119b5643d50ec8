import collections
import random

import pytest

from splashkit.parser import parse_sql
from splashkit.rerank import (
    BeamCandidate,
    BeamError,
    feedback_match_score,
    load_beams,
    near_miss_filter,
    rerank_handcrafted,
    rerank_score,
    rerank_second,
    rerank_uniform,
)

from conftest import BEAMS_PATH


def beam_of(school, *scores):
    """A beam of distinct single-column selects with the given scores."""
    columns = ["first_name", "last_name", "age", "gpa", "id", "school_id"]
    return [
        BeamCandidate(
            query=parse_sql(f"SELECT {columns[i]} FROM students", school),
            score=score,
            rank=i,
        )
        for i, score in enumerate(scores)
    ]


class TestUniform:
    def test_beam_of_two_always_second(self, school):
        beam = beam_of(school, 0.9, 0.1)
        for seed in range(20):
            assert rerank_uniform(beam, rng_seed=seed).chosen is beam[1]

    def test_seed_determinism(self, school):
        beam = beam_of(school, 0.5, 0.3, 0.1, 0.05)
        assert rerank_uniform(beam, rng_seed=7).chosen is rerank_uniform(beam, rng_seed=7).chosen

    def test_frequencies_over_10000_draws(self, school):
        beam = beam_of(school, 0.5, 0.2, 0.15, 0.1, 0.05)
        counts = collections.Counter(
            rerank_uniform(beam, rng_seed=seed).chosen.rank for seed in range(10_000)
        )
        assert counts[0] == 0
        for rank in (1, 2, 3, 4):
            assert abs(counts[rank] / 10_000 - 0.25) <= 0.02

    def test_too_small(self, school):
        with pytest.raises(BeamError):
            rerank_uniform(beam_of(school, 0.9), rng_seed=0)


class TestScore:
    def test_frequencies_proportional_to_score(self, school):
        beam = beam_of(school, 0.9, 0.8, 0.2)
        counts = collections.Counter(
            rerank_score(beam, rng_seed=seed).chosen.rank for seed in range(10_000)
        )
        assert counts[0] == 0
        assert abs(counts[1] / 10_000 - 0.8) <= 0.02
        assert abs(counts[2] / 10_000 - 0.2) <= 0.02

    def test_single_nonzero_tail_score(self, school):
        beam = beam_of(school, 0.9, 0.4, 0.0, 0.0)
        for seed in range(50):
            assert rerank_score(beam, rng_seed=seed).chosen.rank == 1

    def test_all_zero_tail_rejected(self, school):
        with pytest.raises(BeamError):
            rerank_score(beam_of(school, 0.9, 0.0, 0.0), rng_seed=0)

    def test_seed_determinism(self, school):
        beam = beam_of(school, 0.9, 0.5, 0.3)
        assert rerank_score(beam, rng_seed=3).chosen is rerank_score(beam, rng_seed=3).chosen


class TestSecond:
    def test_returns_second(self, school):
        beam = beam_of(school, 0.9, 0.5, 0.3)
        assert rerank_second(beam).chosen is beam[1]

    def test_beam_of_one_rejected(self, school):
        with pytest.raises(BeamError):
            rerank_second(beam_of(school, 0.9))


class TestFeedbackMatch:
    def test_hand_traced_example(self, school):
        mispredicted = parse_sql("SELECT first_name, last_name FROM students", school)
        candidate = parse_sql("SELECT first_name FROM teachers", school)
        # diff items: {last_name, students, teachers}
        score = feedback_match_score(
            candidate, mispredicted, "use the teachers table and drop last name"
        )
        assert score == 2  # teachers and last_name match; students does not

    def test_empty_feedback_scores_zero(self, school):
        mispredicted = parse_sql("SELECT first_name FROM students", school)
        candidate = parse_sql("SELECT last_name FROM students", school)
        assert feedback_match_score(candidate, mispredicted, "") == 0

    def test_candidate_equal_to_mispredicted_scores_zero(self, school):
        query = parse_sql("SELECT first_name FROM students", school)
        assert feedback_match_score(query, query, "anything at all") == 0

    def test_monotone_in_feedback(self, school):
        mispredicted = parse_sql("SELECT first_name, last_name FROM students", school)
        candidate = parse_sql("SELECT first_name FROM teachers", school)
        base = feedback_match_score(candidate, mispredicted, "use teachers")
        more = feedback_match_score(candidate, mispredicted, "use teachers not last name")
        assert more >= base


class TestHandcrafted:
    def test_degenerate_feedback_keeps_top(self, school):
        beam = beam_of(school, 0.9, 0.5, 0.3)
        choice = rerank_handcrafted(beam, beam[0].query, "nothing relevant here")
        assert choice.chosen is beam[0]

    def test_unique_max_wins(self, school):
        beam = beam_of(school, 0.9, 0.5, 0.3, 0.2)
        # beam[2] selects age; name it in the feedback
        choice = rerank_handcrafted(beam, beam[0].query, "you should use age")
        assert choice.chosen is beam[2]

    def test_tie_breaks_to_lowest_rank(self, school):
        beam = beam_of(school, 0.9, 0.5, 0.3)
        choice = rerank_handcrafted(beam, beam[0].query, "")
        assert choice.chosen.rank == 0

    def test_score_scaling_invariance(self, school):
        beam = beam_of(school, 0.8, 0.4, 0.2)
        scaled = [
            BeamCandidate(query=c.query, score=c.score / 2, rank=c.rank) for c in beam
        ]
        feedback = "you should use age"
        assert (
            rerank_handcrafted(beam, beam[0].query, feedback).chosen.rank
            == rerank_handcrafted(scaled, scaled[0].query, feedback).chosen.rank
        )


class TestNearMiss:
    def test_below_threshold_keeps_runner_up(self, school):
        beam = beam_of(school, 0.50, 0.35, 0.1)
        assert near_miss_filter(beam) is beam[1]

    def test_above_threshold_drops(self, school):
        beam = beam_of(school, 0.70, 0.40)
        assert near_miss_filter(beam) is None

    def test_boundary_gap_exactly_at_threshold_drops(self, school):
        from splashkit.rerank import NEAR_MISS_GAP

        # a zero runner-up score makes the gap equal the threshold exactly,
        # avoiding float rounding; the strict comparison must not pass
        beam = beam_of(school, NEAR_MISS_GAP, 0.0)
        assert near_miss_filter(beam) is None


class TestBeamFile:
    def test_fixture_beams_load(self, schemas):
        beams = load_beams(str(BEAMS_PATH), schemas)
        assert len(beams) == 50
        for beam in beams:
            assert [c.rank for c in beam] == list(range(len(beam)))
            assert all(a.score >= b.score for a, b in zip(beam, beam[1:]))

    def test_invalid_rank_order_rejected(self, school):
        from splashkit.rerank import _check_beam

        beam = beam_of(school, 0.9, 0.5)
        broken = [beam[1], beam[0]]
        with pytest.raises(BeamError):
            _check_beam(broken)
