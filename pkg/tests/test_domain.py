"""Feature extraction and per-question progress."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from classpulse.domain import (
    ActivityEvent,
    ActivitySpec,
    EventKind,
    InclusionPolicy,
    QuestionStatus,
    StructuralError,
    ValidationError,
    extract_features,
    student_progress,
)
from conftest import build_spec, hint, resp


def test_empty_log_active_only_yields_zero_rows(spec):
    fm = extract_features([], spec, InclusionPolicy.ACTIVE_ONLY)
    assert fm.n == 0
    assert fm.p == 2 * len(spec.kcs)


def test_single_student_counts(spec):
    # q1 is tagged Mean in the builder layout
    log = [resp("s1", "q1", False), hint("s1", "q1", 1), hint("s1", "q1", 2)]
    fm = extract_features(log, spec)
    assert fm.students == ("s1",)
    row = dict(zip(fm.feature_names, fm.values[0]))
    assert row["incorrect:Mean"] == 1
    assert row["hints:Mean"] == 2
    assert sum(row.values()) == 3


def test_full_roster_includes_silent_students(spec):
    log = [resp("s2", "q1", True)]
    fm = extract_features(log, spec, InclusionPolicy.FULL_ROSTER)
    assert fm.students == ("s1", "s2", "s3", "s4")
    assert fm.values[0].sum() == 0


def test_active_only_rows_in_first_event_order(spec):
    log = [resp("s3", "q1", True), resp("s1", "q2", False), resp("s3", "q2", True)]
    fm = extract_features(log, spec)
    assert fm.students == ("s3", "s1")


def test_repeat_incorrect_responses_all_count(spec):
    log = [resp("s1", "q1", False), resp("s1", "q1", False), resp("s1", "q1", True)]
    fm = extract_features(log, spec)
    assert fm.values[0][fm.feature_names.index("incorrect:Mean")] == 2


def test_empty_roster_is_structural_error():
    empty = ActivitySpec(
        kcs=build_spec().kcs, questions=build_spec().questions, roster=()
    )
    with pytest.raises(StructuralError):
        extract_features([], empty)


def test_unknown_ids_rejected(spec):
    with pytest.raises(ValidationError):
        extract_features([resp("ghost", "q1", True)], spec)
    with pytest.raises(ValidationError):
        extract_features([resp("s1", "q99", True)], spec)


def test_event_shape_invariants():
    with pytest.raises(StructuralError):
        ActivityEvent("s1", "q1", EventKind.RESPONSE)  # missing correct
    with pytest.raises(StructuralError):
        ActivityEvent("s1", "q1", EventKind.HINT)  # missing ordinal
    with pytest.raises(StructuralError):
        ActivityEvent("s1", "q1", EventKind.HINT, correct=True, hint_ordinal=1)
    with pytest.raises(StructuralError):
        ActivityEvent("s1", "q1", EventKind.RESPONSE, correct=False, hint_ordinal=1)


def test_progress_no_events_unattempted(spec):
    progress = student_progress([], spec, "s1")
    assert all(q.status is QuestionStatus.UNATTEMPTED for q in progress.questions)
    assert progress.answered == 0


def test_progress_first_response_wins(spec):
    log = [resp("s1", "q1", True), resp("s1", "q1", False)]
    progress = student_progress(log, spec, "s1")
    assert progress.questions[0].status is QuestionStatus.CORRECT


def test_progress_hints_counted(spec):
    log = [hint("s1", "q2", 1), hint("s1", "q2", 2), hint("s1", "q2", 3), resp("s1", "q2", False)]
    progress = student_progress(log, spec, "s1")
    q2 = progress.questions[1]
    assert q2.status is QuestionStatus.INCORRECT
    assert q2.hints == 3


def test_progress_unknown_student(spec):
    with pytest.raises(ValidationError):
        student_progress([], spec, "nope")


# -- properties --------------------------------------------------------------

def event_strategy(spec: ActivitySpec):
    students = st.sampled_from([s.id for s in spec.roster])
    questions = st.sampled_from([q.id for q in spec.questions])
    responses = st.builds(resp, students, questions, st.booleans())
    hints = st.builds(hint, students, questions, st.integers(1, 3))
    return st.one_of(responses, hints)


@given(st.data())
@settings(max_examples=60)
def test_extraction_is_deterministic_and_conserving(data):
    spec = build_spec()
    log = data.draw(st.lists(event_strategy(spec), max_size=40))
    fm1 = extract_features(log, spec, InclusionPolicy.FULL_ROSTER)
    fm2 = extract_features(log, spec, InclusionPolicy.FULL_ROSTER)
    assert np.array_equal(fm1.values, fm2.values)
    assert fm1.students == fm2.students

    for kc in spec.kcs:
        col = fm1.feature_names.index(f"incorrect:{kc.id}")
        recount = sum(
            1
            for e in log
            if e.kind is EventKind.RESPONSE
            and not e.correct
            and spec.kc_of_question(e.question_id) == kc.id
        )
        assert fm1.values[:, col].sum() == recount


@given(st.data())
@settings(max_examples=40)
def test_appending_never_decreases_counts(data):
    spec = build_spec()
    log = data.draw(st.lists(event_strategy(spec), max_size=25))
    extra = data.draw(event_strategy(spec))
    before = extract_features(log, spec, InclusionPolicy.FULL_ROSTER).values
    after = extract_features(list(log) + [extra], spec, InclusionPolicy.FULL_ROSTER).values
    assert (after >= before).all()
