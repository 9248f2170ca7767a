"""Scores, KPIs, KC summaries, and the score histogram."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from classpulse.analytics import (
    InvalidBinWidth,
    compute_kpis,
    kc_summary,
    present_scores,
    score_histogram,
    student_score,
)
from classpulse.domain import (
    EventKind,
    InclusionPolicy,
    all_progress,
    extract_features,
    student_progress,
)
from conftest import build_spec, hint, resp


def test_score_absent_when_nothing_answered(spec):
    assert student_score(student_progress([], spec, "s1")) is None


def test_score_all_first_correct(spec):
    log = [resp("s1", "q1", True), resp("s1", "q2", True), resp("s1", "q3", True)]
    assert student_score(student_progress(log, spec, "s1")) == 100.0


def test_score_half(spec):
    log = [
        resp("s1", "q1", True),
        resp("s1", "q2", False),
        resp("s1", "q3", True),
        resp("s1", "q4", False),
    ]
    assert student_score(student_progress(log, spec, "s1")) == 50.0


def test_score_denominator_is_answered_not_total(spec):
    log = [resp("s1", "q1", True)]
    assert student_score(student_progress(log, spec, "s1")) == 100.0


def test_kpis_simple_stats(spec):
    # s1 -> 50, s2 -> 75, s3 -> 100 over answered questions
    log = [
        resp("s1", "q1", True), resp("s1", "q2", False),
        resp("s2", "q1", True), resp("s2", "q2", True),
        resp("s2", "q3", True), resp("s2", "q4", False),
        resp("s3", "q1", True),
    ]
    kpis = compute_kpis(log, spec)
    assert (kpis.min_score, kpis.max_score) == (50.0, 100.0)
    assert kpis.median_score == 75.0
    assert kpis.mean_score == 75.0
    assert kpis.active_students == 3
    assert kpis.completed_count == 1  # s2 answered every question


def test_kpis_empty_log(spec):
    kpis = compute_kpis([], spec)
    assert kpis.min_score is None
    assert kpis.max_score is None
    assert kpis.median_score is None
    assert kpis.mean_score is None
    assert kpis.completed_count == 0
    assert kpis.events_seen == 0


def test_kpis_median_even_count_averages_centre(spec):
    log = [
        resp("s1", "q1", True),                        # 100
        resp("s2", "q1", False),                       # 0
        resp("s3", "q1", True), resp("s3", "q2", False),  # 50
        resp("s4", "q1", True),                        # 100
    ]
    kpis = compute_kpis(log, spec)
    assert kpis.median_score == 75.0  # mean of 50 and 100


def test_kpis_completed_counts_fully_answered(spec):
    log = [resp("s1", q.id, True) for q in spec.questions]
    kpis = compute_kpis(log, spec)
    assert kpis.completed_count == 1


def test_kc_summary_empty(spec):
    fm = extract_features([], spec, InclusionPolicy.FULL_ROSTER)
    summary = kc_summary(fm, spec)
    assert all(t.incorrect_total == 0 and t.hints_total == 0 for t in summary.kcs)


def test_kc_summary_single_row(spec):
    log = [resp("s1", "q1", False), resp("s1", "q2", False), hint("s1", "q1", 1)]
    fm = extract_features(log, spec, InclusionPolicy.FULL_ROSTER)
    summary = kc_summary(fm, spec)
    mean = next(t for t in summary.kcs if t.kc_id == "Mean")
    assert (mean.incorrect_total, mean.hints_total) == (2, 1)


def random_log(rng, spec, size):
    log = []
    students = [s.id for s in spec.roster]
    questions = [q.id for q in spec.questions]
    for _ in range(size):
        sid, qid = rng.choice(students), rng.choice(questions)
        if rng.random() < 0.3:
            log.append(hint(sid, qid, 1))
        else:
            log.append(resp(sid, qid, rng.random() < 0.6))
    return log


def test_kc_summary_matches_event_recount():
    spec = build_spec(n_students=6, kc_names=("Mean", "Circle Graph", "Venn Diagram"))
    rng = random.Random(42)
    for _ in range(20):
        log = random_log(rng, spec, rng.randint(0, 60))
        fm = extract_features(log, spec, InclusionPolicy.FULL_ROSTER)
        summary = {t.kc_id: (t.incorrect_total, t.hints_total) for t in kc_summary(fm, spec).kcs}
        recount = {kc.id: [0, 0] for kc in spec.kcs}
        for e in log:
            k = spec.kc_of_question(e.question_id)
            if e.kind is EventKind.RESPONSE and not e.correct:
                recount[k][0] += 1
            elif e.kind is EventKind.HINT:
                recount[k][1] += 1
        assert summary == {k: tuple(v) for k, v in recount.items()}


def test_histogram_score_100_lands_in_closed_last_bin():
    h = score_histogram([100.0], 10)
    assert h.bins[-1] == 1
    assert sum(h.bins) == 1


def test_histogram_zero_in_first_bin():
    h = score_histogram([0.0], 10)
    assert h.bins[0] == 1


def test_histogram_rejects_non_divisor_width():
    with pytest.raises(InvalidBinWidth):
        score_histogram([50.0], 30)
    with pytest.raises(InvalidBinWidth):
        score_histogram([50.0], 0)


def test_histogram_excludes_absent():
    h = score_histogram([None, 55.0, None], 10)
    assert sum(h.bins) == 1
    assert h.bins[5] == 1


@given(st.lists(st.one_of(st.none(), st.floats(0, 100)), max_size=50),
       st.sampled_from([5, 10, 20, 25, 50]))
@settings(max_examples=60)
def test_histogram_conservation(scores, width):
    h = score_histogram(scores, width)
    assert sum(h.bins) == sum(1 for s in scores if s is not None)
    assert len(h.bins) == 100 // width


@given(st.data())
@settings(max_examples=40)
def test_kpi_ordering_invariant(data):
    spec = build_spec()
    students = st.sampled_from([s.id for s in spec.roster])
    questions = st.sampled_from([q.id for q in spec.questions])
    log = data.draw(
        st.lists(st.builds(resp, students, questions, st.booleans()), max_size=40)
    )
    kpis = compute_kpis(log, spec)
    if kpis.min_score is not None:
        assert kpis.min_score <= kpis.median_score <= kpis.max_score
        assert kpis.min_score <= kpis.mean_score <= kpis.max_score
    assert kpis.completed_count <= len(spec.roster)


def test_completed_count_monotone(spec):
    rng = random.Random(9)
    log = random_log(rng, spec, 80)
    previous = 0
    for cut in range(len(log) + 1):
        count = compute_kpis(log[:cut], spec).completed_count
        assert count >= previous
        previous = count


def test_present_scores_matches_progress(spec):
    log = [resp("s1", "q1", True), resp("s2", "q1", False)]
    scores = present_scores(all_progress(log, spec))
    assert sorted(scores) == [0.0, 100.0]
