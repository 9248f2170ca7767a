"""Versioned analytics snapshots and the recompute pipeline that builds them.

A snapshot is an immutable bundle of everything the dashboard shows for one
event-log prefix: KPIs, per-student progress, KC totals, the score histogram,
the clustering result (four linkage models, the selected one, its dendrogram
and flat cut, per-cluster KC breakdowns), alerts, and recommendations. All
parts derive from the same prefix, so a snapshot is self-consistent.

Clustering is Absent, with a machine-readable reason, when fewer than two
students are active or when every feature column is constant; KPIs are still
computed. An unexpected numeric failure degrades the snapshot instead of
dropping it: the previous clustering is retained and the error is surfaced
in the snapshot metadata.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Sequence

from . import analytics, clustering, recommend
from .analytics import KcSummary, KpiSnapshot, ScoreHistogram
from .clustering import (
    ClusterAssignment,
    ClusteringModel,
    Dendrogram,
    DegenerateFeatures,
    Linkage,
    build_dendrogram,
    choose_k,
    cut_tree,
    dendrogram_wire,
    gower_dissimilarity,
    select_model,
)
from .config import ServerConfig
from .domain import (
    ActivityEvent,
    ActivitySpec,
    InclusionPolicy,
    StudentProgress,
    all_progress,
    extract_features,
)
from .recommend import Alert, ClusterRecommendation

REASON_TOO_FEW = "insufficient_observations"
REASON_DEGENERATE = "degenerate_features"


@dataclass(frozen=True)
class ClusterBreakdown:
    """Per-cluster member ids/names and KC-level incorrect/hint sums."""

    index: int
    members: tuple[str, ...]
    names: tuple[str, ...]
    incorrect_by_kc: dict[str, int]
    hints_by_kc: dict[str, int]


@dataclass(frozen=True)
class ClusteringView:
    """The full clustering result carried by a snapshot."""

    acs: dict[str, float]
    selected: Linkage
    model: ClusteringModel
    dendrogram: Dendrogram
    assignment: ClusterAssignment
    k: int
    k_policy: str
    k_flagged: bool
    clusters: tuple[ClusterBreakdown, ...]


@dataclass(frozen=True)
class AnalyticsSnapshot:
    version: int
    events_seen: int
    computed_at: int
    kpis: KpiSnapshot
    progress: tuple[StudentProgress, ...]
    kc_summary: KcSummary
    histogram: ScoreHistogram
    clustering: ClusteringView | None
    clustering_absent_reason: str | None
    alerts: tuple[Alert, ...]
    recommendations: tuple[ClusterRecommendation, ...]
    degraded: bool = False
    error: str | None = None


def _cluster_breakdowns(
    assignment: ClusterAssignment, fm, spec: ActivitySpec
) -> tuple[ClusterBreakdown, ...]:
    inc_cols = [fm.feature_names.index(f"incorrect:{kc.id}") for kc in spec.kcs]
    hint_cols = [fm.feature_names.index(f"hints:{kc.id}") for kc in spec.kcs]
    out = []
    for cluster in range(assignment.k):
        rows = [i for i, c in enumerate(assignment.member_of) if c == cluster]
        ids = tuple(fm.students[i] for i in rows)
        out.append(
            ClusterBreakdown(
                index=cluster,
                members=ids,
                names=tuple(spec.name_of(s) for s in ids),
                incorrect_by_kc={
                    kc.id: int(fm.values[rows][:, [col]].sum())
                    for kc, col in zip(spec.kcs, inc_cols)
                },
                hints_by_kc={
                    kc.id: int(fm.values[rows][:, [col]].sum())
                    for kc, col in zip(spec.kcs, hint_cols)
                },
            )
        )
    return tuple(out)


def _compute_clustering(
    log: Sequence[ActivityEvent], spec: ActivitySpec, config: ServerConfig
) -> tuple[ClusteringView | None, str | None, list[ClusterRecommendation]]:
    fm = extract_features(log, spec, InclusionPolicy.ACTIVE_ONLY)
    if fm.n < 2:
        return None, REASON_TOO_FEW, []
    try:
        D = gower_dissimilarity(fm)
    except DegenerateFeatures:
        return None, REASON_DEGENERATE, []

    models = [clustering.agnes(D, linkage) for linkage in Linkage]
    selected = select_model(models)
    dendro = build_dendrogram(selected.trace, D.labels)

    if config.k == "auto":
        choice = choose_k(selected.trace, D)
        k, k_flagged, policy = choice.k, choice.flagged, "auto"
    else:
        k = min(int(config.k), fm.n)
        k_flagged, policy = k != config.k, "fixed"
    assignment = cut_tree(selected.trace, k, labels=D.labels)

    view = ClusteringView(
        acs={m.linkage.value: m.ac for m in models},
        selected=selected.linkage,
        model=selected,
        dendrogram=dendro,
        assignment=assignment,
        k=k,
        k_policy=policy,
        k_flagged=k_flagged,
        clusters=_cluster_breakdowns(assignment, fm, spec),
    )
    recommendations = recommend.describe_clusters(assignment, fm, spec)
    return view, None, recommendations


def recompute(
    log: Sequence[ActivityEvent],
    spec: ActivitySpec,
    config: ServerConfig,
    version: int,
    previous: AnalyticsSnapshot | None = None,
    computed_at_ms: int | None = None,
) -> AnalyticsSnapshot:
    """One full pass: features -> Gower -> four models -> selection -> cut ->
    analytics -> alerts and recommendations, over a fixed log prefix."""
    progress = tuple(all_progress(log, spec))
    kpis = analytics.compute_kpis(log, spec, version=version)
    full = extract_features(log, spec, InclusionPolicy.FULL_ROSTER)
    summary = analytics.kc_summary(full, spec)
    histogram = analytics.score_histogram(
        [analytics.student_score(p) for p in progress], config.histogram_bin_width
    )

    degraded = False
    error: str | None = None
    try:
        view, reason, recommendations = _compute_clustering(log, spec, config)
    except Exception as exc:  # numeric failure: keep serving, retain old clustering
        degraded = True
        error = f"{type(exc).__name__}: {exc}"
        if previous is not None:
            view = previous.clustering
            reason = previous.clustering_absent_reason
            recommendations = list(previous.recommendations)
        else:
            view, reason, recommendations = None, None, []

    alerts = recommend.evaluate_alerts(
        log, spec, config.rules(), previous.alerts if previous is not None else ()
    )

    return AnalyticsSnapshot(
        version=version,
        events_seen=len(log),
        computed_at=computed_at_ms if computed_at_ms is not None else int(time.time() * 1000),
        kpis=kpis,
        progress=progress,
        kc_summary=summary,
        histogram=histogram,
        clustering=view,
        clustering_absent_reason=reason,
        alerts=tuple(alerts),
        recommendations=tuple(recommendations),
        degraded=degraded,
        error=error,
    )


# ---------------------------------------------------------------------------
# Wire forms. Every field name here is part of the HTTP contract.
# ---------------------------------------------------------------------------


def kpis_wire(kpis: KpiSnapshot) -> dict:
    return {
        "min_score": kpis.min_score,
        "max_score": kpis.max_score,
        "median_score": kpis.median_score,
        "mean_score": kpis.mean_score,
        "completed_count": kpis.completed_count,
        "active_students": kpis.active_students,
        "events_seen": kpis.events_seen,
        "version": kpis.version,
    }


def progress_wire(progress: StudentProgress, spec: ActivitySpec) -> dict:
    return {
        "student_id": progress.student_id,
        "name": spec.name_of(progress.student_id),
        "score": analytics.student_score(progress),
        "answered": progress.answered,
        "completed": progress.completed,
        "total_hints": progress.total_hints,
        "questions": [
            {"question_id": q.question_id, "status": q.status.value, "hints": q.hints}
            for q in progress.questions
        ],
    }


def clustering_wire(view: ClusteringView | None, reason: str | None) -> dict:
    if view is None:
        return {"available": False, "reason": reason}
    return {
        "available": True,
        "reason": None,
        "acs": view.acs,
        "selected": view.selected.value,
        "k": view.k,
        "k_policy": view.k_policy,
        "k_flagged": view.k_flagged,
        "dendrogram": dendrogram_wire(view.model, view.dendrogram),
        "assignment": {
            "k": view.assignment.k,
            "labels": list(view.assignment.labels),
            "member_of": list(view.assignment.member_of),
        },
        "clusters": [
            {
                "index": c.index,
                "members": list(c.members),
                "names": list(c.names),
                "incorrect_by_kc": c.incorrect_by_kc,
                "hints_by_kc": c.hints_by_kc,
            }
            for c in view.clusters
        ],
    }


def alert_wire(alert: Alert) -> dict:
    return {
        "rule": alert.rule_id,
        "kind": alert.kind.value,
        "severity": alert.severity.value,
        "subject_type": alert.subject_type,
        "subject": alert.subject,
        "message": alert.message,
        "first_seen": alert.first_seen,
        "last_seen": alert.last_seen,
    }


def recommendation_wire(rec: ClusterRecommendation) -> dict:
    return {
        "cluster": rec.cluster,
        "members": list(rec.members),
        "dominant_incorrect_kc": rec.dominant_incorrect_kc,
        "dominant_hint_kc": rec.dominant_hint_kc,
        "message": rec.message,
    }


def snapshot_wire(snapshot: AnalyticsSnapshot, spec: ActivitySpec) -> dict:
    return {
        "version": snapshot.version,
        "events_seen": snapshot.events_seen,
        "computed_at": snapshot.computed_at,
        "kpis": kpis_wire(snapshot.kpis),
        "progress": [progress_wire(p, spec) for p in snapshot.progress],
        "kc_summary": {
            "kcs": [
                {
                    "id": t.kc_id,
                    "name": t.kc_name,
                    "incorrect_total": t.incorrect_total,
                    "hints_total": t.hints_total,
                }
                for t in snapshot.kc_summary.kcs
            ]
        },
        "histogram": {
            "bin_width": snapshot.histogram.bin_width,
            "bins": list(snapshot.histogram.bins),
            "edges": list(snapshot.histogram.edges),
        },
        "clustering": clustering_wire(snapshot.clustering, snapshot.clustering_absent_reason),
        "alerts": [alert_wire(a) for a in snapshot.alerts],
        "recommendations": [recommendation_wire(r) for r in snapshot.recommendations],
        "degraded": snapshot.degraded,
        "error": snapshot.error,
    }


def spec_wire(spec: ActivitySpec) -> dict:
    return {
        "kcs": [{"id": kc.id, "name": kc.name} for kc in spec.kcs],
        "questions": [{"id": q.id, "kc_id": q.kc_id} for q in spec.questions],
        "roster": [{"id": s.id, "name": s.name} for s in spec.roster],
    }
