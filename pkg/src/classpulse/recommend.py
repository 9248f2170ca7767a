"""Instructor-facing alerts and per-cluster recommendations.

The rule catalog, thresholds, and message templates are this artifact's own;
all are overridable through configuration. Alerts deduplicate on
(rule, subject): re-evaluating an unchanged log yields the same alerts with
the same first_seen. Evaluation is pure; previous alerts come in as an
argument and a fresh list goes out.
"""

from __future__ import annotations

import enum
import statistics
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .analytics import present_scores
from .clustering import ClusterAssignment
from .domain import (
    ActivityEvent,
    ActivitySpec,
    EventKind,
    FeatureMatrix,
    QuestionStatus,
    StructuralError,
    all_progress,
)


class AlertKind(str, enum.Enum):
    WRONG_STREAK = "wrong_streak"
    HINT_HEAVY = "hint_heavy"
    CLASS_STRUGGLE = "class_struggle"
    LOW_MEDIAN = "low_median"


class Severity(str, enum.Enum):
    INFO = "info"
    WARNING = "warning"


@dataclass(frozen=True)
class AlertRule:
    """One alert trigger with its thresholds.

    Only the parameters relevant to ``kind`` are read: streak_length for
    WRONG_STREAK, hint_total for HINT_HEAVY, (fraction, min_answers) for
    CLASS_STRUGGLE, (percentage, min_scores) for LOW_MEDIAN.
    """

    id: str
    kind: AlertKind
    severity: Severity = Severity.WARNING
    enabled: bool = True
    streak_length: int = 3
    hint_total: int = 5
    fraction: float = 0.5
    min_answers: int = 3
    percentage: float = 60.0
    min_scores: int = 5

    def __post_init__(self) -> None:
        if self.streak_length <= 0 or self.hint_total <= 0 or self.min_answers <= 0:
            raise StructuralError("alert thresholds must be strictly positive")
        if not 0.0 < self.fraction <= 1.0:
            raise StructuralError("fraction must be in (0, 1]")
        if self.percentage <= 0 or self.min_scores <= 0:
            raise StructuralError("alert thresholds must be strictly positive")


@dataclass(frozen=True)
class Alert:
    rule_id: str
    kind: AlertKind
    severity: Severity
    subject_type: str  # "student" | "question" | "class"
    subject: str
    message: str
    first_seen: int
    last_seen: int


@dataclass(frozen=True)
class ClusterRecommendation:
    cluster: int
    members: tuple[str, ...]
    dominant_incorrect_kc: str | None
    dominant_hint_kc: str | None
    message: str


def default_rules(
    streak_length: int = 3,
    hint_total: int = 5,
    fraction: float = 0.5,
    min_answers: int = 3,
    percentage: float = 60.0,
    min_scores: int = 5,
) -> tuple[AlertRule, ...]:
    return (
        AlertRule("wrong-streak", AlertKind.WRONG_STREAK, Severity.WARNING, streak_length=streak_length),
        AlertRule("hint-heavy", AlertKind.HINT_HEAVY, Severity.INFO, hint_total=hint_total),
        AlertRule(
            "class-struggle",
            AlertKind.CLASS_STRUGGLE,
            Severity.WARNING,
            fraction=fraction,
            min_answers=min_answers,
        ),
        AlertRule(
            "low-median",
            AlertKind.LOW_MEDIAN,
            Severity.WARNING,
            percentage=percentage,
            min_scores=min_scores,
        ),
    )


def _first_responses(log: Sequence[ActivityEvent], student_id: str) -> list[bool]:
    """Correctness of the student's first response per question, in answer order."""
    seen: set[str] = set()
    out: list[bool] = []
    for event in log:
        if event.student_id != student_id or event.kind is not EventKind.RESPONSE:
            continue
        if event.question_id in seen:
            continue
        seen.add(event.question_id)
        out.append(bool(event.correct))
    return out


def _wrong_streak_hits(log, spec, rule) -> list[tuple[str, str]]:
    hits = []
    for entry in spec.roster:
        firsts = _first_responses(log, entry.id)
        L = rule.streak_length
        if len(firsts) >= L and not any(firsts[-L:]):
            hits.append(
                (
                    entry.id,
                    f"{entry.name} answered the last {L} questions incorrectly. "
                    f"Consider checking in.",
                )
            )
    return hits


def _hint_heavy_hits(log, spec, rule) -> list[tuple[str, str]]:
    totals: dict[str, int] = {}
    for event in log:
        if event.kind is EventKind.HINT:
            totals[event.student_id] = totals.get(event.student_id, 0) + 1
    hits = []
    for entry in spec.roster:
        n = totals.get(entry.id, 0)
        if n >= rule.hint_total:
            hits.append(
                (entry.id, f"{entry.name} has used {n} hints so far. They may need direct support.")
            )
    return hits


def _class_struggle_hits(log, spec, rule) -> list[tuple[str, str]]:
    hits = []
    progresses = all_progress(log, spec)
    for qi, question in enumerate(spec.questions):
        answered = 0
        incorrect = 0
        for p in progresses:
            status = p.questions[qi].status
            if status is not QuestionStatus.UNATTEMPTED:
                answered += 1
                if status is QuestionStatus.INCORRECT:
                    incorrect += 1
        if answered >= rule.min_answers and incorrect / answered > rule.fraction:
            kc_name = spec.kc_by_id(question.kc_id).name
            pct = round(100.0 * incorrect / answered)
            hits.append(
                (
                    question.id,
                    f"{pct}% of students answered question {question.id} incorrectly. "
                    f"Consider revisiting {kc_name}.",
                )
            )
    return hits


def _low_median_hits(log, spec, rule) -> list[tuple[str, str]]:
    scores = present_scores(all_progress(log, spec))
    if len(scores) >= rule.min_scores:
        median = float(statistics.median(scores))
        if median < rule.percentage:
            return [
                (
                    "class",
                    f"Class median score is {median:.0f}. Consider slowing down or "
                    f"reviewing recent material.",
                )
            ]
    return []


_EVALUATORS = {
    AlertKind.WRONG_STREAK: (_wrong_streak_hits, "student"),
    AlertKind.HINT_HEAVY: (_hint_heavy_hits, "student"),
    AlertKind.CLASS_STRUGGLE: (_class_struggle_hits, "question"),
    AlertKind.LOW_MEDIAN: (_low_median_hits, "class"),
}


def evaluate_alerts(
    log: Sequence[ActivityEvent],
    spec: ActivitySpec,
    rules: Sequence[AlertRule] = (),
    previous_alerts: Sequence[Alert] = (),
) -> list[Alert]:
    """Evaluate every enabled rule over the log; carry first_seen across snapshots."""
    if not rules:
        rules = default_rules()
    high_water = log[-1].seq if log and log[-1].seq is not None else len(log)
    prior = {(a.rule_id, a.subject): a for a in previous_alerts}
    out: list[Alert] = []
    for rule in rules:
        if not rule.enabled:
            continue
        evaluator, subject_type = _EVALUATORS[rule.kind]
        for subject, message in evaluator(log, spec, rule):
            old = prior.get((rule.id, subject))
            out.append(
                Alert(
                    rule_id=rule.id,
                    kind=rule.kind,
                    severity=rule.severity,
                    subject_type=subject_type,
                    subject=subject,
                    message=message,
                    first_seen=old.first_seen if old else high_water,
                    last_seen=high_water,
                )
            )
    return out


GROUP_TEMPLATE = (
    "Group {g} ({members}): most incorrect answers in {kc_i}; most hints used "
    "in {kc_h}. Consider targeted review of {kc_i}."
)
GROUP_TEMPLATE_QUIET = "Group {g} ({members}) shows no difficulties so far."


def _dominant_kc(sums: np.ndarray, names: list[str]) -> int:
    """Index of the KC with the largest count; ties go to the ascending name."""
    best = 0
    for i in range(1, len(names)):
        if sums[i] > sums[best] or (sums[i] == sums[best] and names[i] < names[best]):
            best = i
    return best


def describe_clusters(
    assignment: ClusterAssignment,
    fm: FeatureMatrix,
    spec: ActivitySpec,
    template: str = GROUP_TEMPLATE,
    quiet_template: str = GROUP_TEMPLATE_QUIET,
) -> list[ClusterRecommendation]:
    """One template-based recommendation per cluster.

    Dominant KCs are the argmax of summed incorrect counts and summed hint
    counts over the cluster's rows; a cluster whose counts are all zero gets
    the quiet template instead.
    """
    if tuple(assignment.labels) != tuple(fm.students) or len(assignment.member_of) != fm.n:
        raise StructuralError("cluster assignment does not align with the feature matrix")

    kc_names = [kc.name for kc in spec.kcs]
    inc_cols = [fm.feature_names.index(f"incorrect:{kc.id}") for kc in spec.kcs]
    hint_cols = [fm.feature_names.index(f"hints:{kc.id}") for kc in spec.kcs]

    out: list[ClusterRecommendation] = []
    for cluster in range(assignment.k):
        rows = [i for i, c in enumerate(assignment.member_of) if c == cluster]
        names = tuple(spec.name_of(fm.students[i]) for i in rows)
        inc_sums = fm.values[rows][:, inc_cols].sum(axis=0)
        hint_sums = fm.values[rows][:, hint_cols].sum(axis=0)
        members = ", ".join(names)
        if not inc_sums.any() and not hint_sums.any():
            out.append(
                ClusterRecommendation(
                    cluster=cluster,
                    members=names,
                    dominant_incorrect_kc=None,
                    dominant_hint_kc=None,
                    message=quiet_template.format(g=cluster + 1, members=members),
                )
            )
            continue
        kc_i = spec.kcs[_dominant_kc(inc_sums, kc_names)]
        kc_h = spec.kcs[_dominant_kc(hint_sums, kc_names)]
        out.append(
            ClusterRecommendation(
                cluster=cluster,
                members=names,
                dominant_incorrect_kc=kc_i.id,
                dominant_hint_kc=kc_h.id,
                message=template.format(
                    g=cluster + 1, members=members, kc_i=kc_i.name, kc_h=kc_h.name
                ),
            )
        )
    return out
