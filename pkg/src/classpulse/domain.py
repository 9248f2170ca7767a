"""Core domain types for a live classroom activity.

An activity is described by an :class:`ActivitySpec` (knowledge components,
questions, roster). Student behaviour arrives as an append-only stream of
:class:`ActivityEvent` values. From the event log we derive per-student
feature vectors (incorrect counts and hint counts per knowledge component)
and per-question progress.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np


class StructuralError(ValueError):
    """A structural precondition on domain inputs is violated."""


class ValidationError(ValueError):
    """An event or id does not resolve against the activity spec."""


class EventKind(str, enum.Enum):
    RESPONSE = "response"
    HINT = "hint"


class InclusionPolicy(str, enum.Enum):
    """Which students get a feature row.

    ACTIVE_ONLY keeps students with at least one event (default: all-zero
    silent students would form a misleading degenerate cluster mid-activity).
    FULL_ROSTER emits a zero row for silent students, in roster order.
    """

    ACTIVE_ONLY = "active_only"
    FULL_ROSTER = "full_roster"


class FeatureKind(str, enum.Enum):
    NUMERIC = "numeric"
    CATEGORICAL = "categorical"


@dataclass(frozen=True)
class KnowledgeComponent:
    """A learning concept (e.g. "Mean", "Circle Graph") that questions are tagged with."""

    id: str
    name: str

    def __post_init__(self) -> None:
        if not self.name:
            raise StructuralError("knowledge component name must be non-empty")


@dataclass(frozen=True)
class Question:
    id: str
    kc_id: str


@dataclass(frozen=True)
class RosterEntry:
    id: str
    name: str


@dataclass(frozen=True)
class ActivitySpec:
    """One in-class activity: its knowledge components, questions, and roster."""

    kcs: tuple[KnowledgeComponent, ...]
    questions: tuple[Question, ...]
    roster: tuple[RosterEntry, ...]

    def __post_init__(self) -> None:
        kc_ids = [kc.id for kc in self.kcs]
        if len(set(kc_ids)) != len(kc_ids):
            raise StructuralError("knowledge component ids must be unique")
        q_ids = [q.id for q in self.questions]
        if len(set(q_ids)) != len(q_ids):
            raise StructuralError("question ids must be unique")
        known = set(kc_ids)
        for q in self.questions:
            if q.kc_id not in known:
                raise StructuralError(f"question {q.id!r} references undeclared KC {q.kc_id!r}")
        s_ids = [s.id for s in self.roster]
        if len(set(s_ids)) != len(s_ids):
            raise StructuralError("roster ids must be unique")

    def kc_by_id(self, kc_id: str) -> KnowledgeComponent:
        for kc in self.kcs:
            if kc.id == kc_id:
                return kc
        raise ValidationError(f"unknown knowledge component {kc_id!r}")

    def kc_of_question(self, question_id: str) -> str:
        for q in self.questions:
            if q.id == question_id:
                return q.kc_id
        raise ValidationError(f"unknown question {question_id!r}")

    def student_ids(self) -> set[str]:
        return {s.id for s in self.roster}

    def question_ids(self) -> set[str]:
        return {q.id for q in self.questions}

    def name_of(self, student_id: str) -> str:
        for s in self.roster:
            if s.id == student_id:
                return s.name
        raise ValidationError(f"unknown student {student_id!r}")


@dataclass(frozen=True)
class ActivityEvent:
    """One timestamped student action: a response (with correctness) or a hint use.

    ``seq`` and ``timestamp`` are assigned by the ingesting store; events built
    from parsers carry ``None`` until ingested. ``timestamp`` is milliseconds
    since the stream epoch (the first ingested event is at 0).
    """

    student_id: str
    question_id: str
    kind: EventKind
    correct: bool | None = None
    hint_ordinal: int | None = None
    seq: int | None = None
    timestamp: int | None = None

    def __post_init__(self) -> None:
        if self.kind is EventKind.RESPONSE:
            if self.correct is None:
                raise StructuralError("response events must carry `correct`")
            if self.hint_ordinal is not None:
                raise StructuralError("response events must not carry `hint_ordinal`")
        else:
            if self.hint_ordinal is None or self.hint_ordinal < 1:
                raise StructuralError("hint events must carry a positive `hint_ordinal`")
            if self.correct is not None:
                raise StructuralError("hint events must not carry `correct`")

    @classmethod
    def response(cls, student_id: str, question_id: str, correct: bool, **kw) -> "ActivityEvent":
        return cls(student_id, question_id, EventKind.RESPONSE, correct=correct, **kw)

    @classmethod
    def hint(cls, student_id: str, question_id: str, ordinal: int = 1, **kw) -> "ActivityEvent":
        return cls(student_id, question_id, EventKind.HINT, hint_ordinal=ordinal, **kw)


@dataclass(frozen=True)
class StudentFeatureVector:
    """Per-KC incorrect-response and hint-use counts for one student."""

    student_id: str
    incorrect_per_kc: dict[str, int]
    hints_per_kc: dict[str, int]


@dataclass(frozen=True)
class FeatureMatrix:
    """n students x p features; one incorrect and one hint column per KC.

    Row order is deterministic: roster order under FULL_ROSTER, first-event
    order under ACTIVE_ONLY, so downstream tie-breaking is reproducible.
    """

    students: tuple[str, ...]
    feature_names: tuple[str, ...]
    values: np.ndarray
    feature_kinds: tuple[FeatureKind, ...]

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        object.__setattr__(self, "values", v)
        if v.shape != (len(self.students), len(self.feature_names)):
            raise StructuralError("feature matrix shape does not match row/column labels")
        if len(self.feature_kinds) != len(self.feature_names):
            raise StructuralError("one feature kind per column is required")
        if v.size and not np.isfinite(v).all():
            raise StructuralError("feature values must be finite")

    @property
    def n(self) -> int:
        return len(self.students)

    @property
    def p(self) -> int:
        return len(self.feature_names)


class QuestionStatus(str, enum.Enum):
    UNATTEMPTED = "unattempted"
    CORRECT = "correct"
    INCORRECT = "incorrect"


@dataclass(frozen=True)
class QuestionProgress:
    question_id: str
    status: QuestionStatus
    hints: int


@dataclass(frozen=True)
class StudentProgress:
    """Per-question status for one student, in activity question order.

    Status is fixed by the student's first response to each question; later
    responses do not change it (they still count in feature extraction).
    """

    student_id: str
    questions: tuple[QuestionProgress, ...]

    @property
    def answered(self) -> int:
        return sum(1 for q in self.questions if q.status is not QuestionStatus.UNATTEMPTED)

    @property
    def first_correct(self) -> int:
        return sum(1 for q in self.questions if q.status is QuestionStatus.CORRECT)

    @property
    def completed(self) -> bool:
        return self.answered == len(self.questions)

    @property
    def total_hints(self) -> int:
        return sum(q.hints for q in self.questions)


def validate_event(event: ActivityEvent, spec: ActivitySpec) -> None:
    """Raise ValidationError unless the event's ids resolve against the spec."""
    if event.student_id not in spec.student_ids():
        raise ValidationError(f"unknown student {event.student_id!r}")
    if event.question_id not in spec.question_ids():
        raise ValidationError(f"unknown question {event.question_id!r}")


def feature_names_for(spec: ActivitySpec) -> tuple[tuple[str, ...], tuple[FeatureKind, ...]]:
    """Column layout: all incorrect counts (KC order), then all hint counts."""
    names = [f"incorrect:{kc.id}" for kc in spec.kcs] + [f"hints:{kc.id}" for kc in spec.kcs]
    kinds = tuple(FeatureKind.NUMERIC for _ in names)
    return tuple(names), kinds


def student_feature_vectors(
    log: Sequence[ActivityEvent],
    spec: ActivitySpec,
    policy: InclusionPolicy = InclusionPolicy.ACTIVE_ONLY,
) -> list[StudentFeatureVector]:
    """Fold the event log into per-student per-KC counts.

    incorrect_per_kc[k] counts every incorrect response on questions tagged k
    (repeat attempts all count); hints_per_kc[k] counts every hint event.
    """
    if not spec.roster:
        raise StructuralError("activity roster is empty")
    kc_ids = [kc.id for kc in spec.kcs]
    incorrect: dict[str, dict[str, int]] = {}
    hints: dict[str, dict[str, int]] = {}
    seen_order: list[str] = []

    for event in log:
        validate_event(event, spec)
        sid = event.student_id
        if sid not in incorrect:
            incorrect[sid] = {k: 0 for k in kc_ids}
            hints[sid] = {k: 0 for k in kc_ids}
            seen_order.append(sid)
        kc = spec.kc_of_question(event.question_id)
        if event.kind is EventKind.RESPONSE and not event.correct:
            incorrect[sid][kc] += 1
        elif event.kind is EventKind.HINT:
            hints[sid][kc] += 1

    if policy is InclusionPolicy.FULL_ROSTER:
        order = [s.id for s in spec.roster]
    else:
        order = seen_order

    zero = {k: 0 for k in kc_ids}
    return [
        StudentFeatureVector(sid, dict(incorrect.get(sid, zero)), dict(hints.get(sid, zero)))
        for sid in order
    ]


def extract_features(
    log: Sequence[ActivityEvent],
    spec: ActivitySpec,
    policy: InclusionPolicy = InclusionPolicy.ACTIVE_ONLY,
) -> FeatureMatrix:
    """Build the clustering input: one row per included student, 2*|KC| columns."""
    vectors = student_feature_vectors(log, spec, policy)
    names, kinds = feature_names_for(spec)
    kc_ids = [kc.id for kc in spec.kcs]
    rows = [
        [v.incorrect_per_kc[k] for k in kc_ids] + [v.hints_per_kc[k] for k in kc_ids]
        for v in vectors
    ]
    values = np.array(rows, dtype=float) if rows else np.zeros((0, len(names)))
    return FeatureMatrix(
        students=tuple(v.student_id for v in vectors),
        feature_names=names,
        values=values,
        feature_kinds=kinds,
    )


def student_progress(
    log: Sequence[ActivityEvent], spec: ActivitySpec, student_id: str
) -> StudentProgress:
    """Per-question status (first response wins) and hint counts for one student."""
    if student_id not in spec.student_ids():
        raise ValidationError(f"unknown student {student_id!r}")
    status: dict[str, QuestionStatus] = {q.id: QuestionStatus.UNATTEMPTED for q in spec.questions}
    hint_count: dict[str, int] = {q.id: 0 for q in spec.questions}
    for event in log:
        if event.student_id != student_id:
            continue
        if event.question_id not in status:
            raise ValidationError(f"unknown question {event.question_id!r}")
        if event.kind is EventKind.HINT:
            hint_count[event.question_id] += 1
        elif status[event.question_id] is QuestionStatus.UNATTEMPTED:
            status[event.question_id] = (
                QuestionStatus.CORRECT if event.correct else QuestionStatus.INCORRECT
            )
    return StudentProgress(
        student_id=student_id,
        questions=tuple(
            QuestionProgress(q.id, status[q.id], hint_count[q.id]) for q in spec.questions
        ),
    )


def all_progress(log: Sequence[ActivityEvent], spec: ActivitySpec) -> list[StudentProgress]:
    """Progress for every roster student, in roster order."""
    by_student: dict[str, list[ActivityEvent]] = {s.id: [] for s in spec.roster}
    for event in log:
        if event.student_id in by_student:
            by_student[event.student_id].append(event)
    return [student_progress(by_student[s.id], spec, s.id) for s in spec.roster]
