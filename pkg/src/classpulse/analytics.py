"""Dashboard quantities derived from the event log.

Scores, class KPIs, per-KC incorrect/hint totals, and the score histogram.
All functions are deterministic over (log prefix, spec); a score is the
percentage of answered questions whose first response was correct, so
mid-activity scores stay meaningful. Statistics over an empty score set are
Absent (None), never zero.
"""

from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import Sequence

from .domain import (
    ActivityEvent,
    ActivitySpec,
    FeatureMatrix,
    StudentProgress,
    all_progress,
)


class InvalidBinWidth(ValueError):
    """Histogram bin width must be a positive divisor of 100."""


@dataclass(frozen=True)
class KpiSnapshot:
    """Headline class statistics; score fields are None until someone answers."""

    min_score: float | None
    max_score: float | None
    median_score: float | None
    mean_score: float | None
    completed_count: int
    active_students: int
    events_seen: int
    version: int = 0


@dataclass(frozen=True)
class KcTotals:
    kc_id: str
    kc_name: str
    incorrect_total: int
    hints_total: int


@dataclass(frozen=True)
class KcSummary:
    kcs: tuple[KcTotals, ...]


@dataclass(frozen=True)
class ScoreHistogram:
    """Counts per score bin; bin b covers [b*w, (b+1)*w), the last bin is closed."""

    bin_width: int
    bins: tuple[int, ...]

    @property
    def edges(self) -> tuple[int, ...]:
        return tuple(range(0, 101, self.bin_width))


def student_score(progress: StudentProgress) -> float | None:
    """Percent of answered questions whose first response was correct; None if unanswered."""
    if progress.answered == 0:
        return None
    return 100.0 * progress.first_correct / progress.answered


def present_scores(progresses: Sequence[StudentProgress]) -> list[float]:
    return [s for s in (student_score(p) for p in progresses) if s is not None]


def compute_kpis(
    log: Sequence[ActivityEvent], spec: ActivitySpec, version: int = 0
) -> KpiSnapshot:
    """Class KPIs over present scores; median averages the two central values."""
    progresses = all_progress(log, spec)
    scores = present_scores(progresses)
    active = len({e.student_id for e in log})
    completed = sum(1 for p in progresses if p.completed)
    if scores:
        stats = (min(scores), max(scores), float(statistics.median(scores)), sum(scores) / len(scores))
    else:
        stats = (None, None, None, None)
    return KpiSnapshot(
        min_score=stats[0],
        max_score=stats[1],
        median_score=stats[2],
        mean_score=stats[3],
        completed_count=completed,
        active_students=active,
        events_seen=len(log),
        version=version,
    )


def kc_summary(fm: FeatureMatrix, spec: ActivitySpec) -> KcSummary:
    """Per-KC column sums of the incorrect and hint feature families."""
    totals = []
    for kc in spec.kcs:
        inc_col = fm.feature_names.index(f"incorrect:{kc.id}")
        hint_col = fm.feature_names.index(f"hints:{kc.id}")
        inc = int(fm.values[:, inc_col].sum()) if fm.n else 0
        hints = int(fm.values[:, hint_col].sum()) if fm.n else 0
        totals.append(KcTotals(kc.id, kc.name, inc, hints))
    return KcSummary(kcs=tuple(totals))


def score_histogram(scores: Sequence[float | None], bin_width: int = 10) -> ScoreHistogram:
    """Histogram over [0, 100]; Absent scores are excluded."""
    if bin_width <= 0 or 100 % bin_width != 0:
        raise InvalidBinWidth(f"bin width must divide 100, got {bin_width}")
    nbins = 100 // bin_width
    bins = [0] * nbins
    for s in scores:
        if s is None:
            continue
        idx = min(int(s // bin_width), nbins - 1)
        bins[idx] += 1
    return ScoreHistogram(bin_width=bin_width, bins=tuple(bins))
