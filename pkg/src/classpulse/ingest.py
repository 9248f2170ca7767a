"""Event ingestion: file parsing, timed replay, and the append-only store.

Two delimited-text layouts are supported. The generic layout carries one
event per row; the tutoring-log layout carries one response row per
(student, problem) with a hint count that expands into individual hint
events. Replay re-emits a parsed event list on a uniform schedule to
simulate a live in-class stream; live events arrive through
:meth:`EventStore.ingest`, the single serialization point.

Malformed rows are skipped with a logged diagnostic rather than aborting:
live classroom feeds must be fault-tolerant.
"""

from __future__ import annotations

import csv
import enum
import logging
import threading
import time
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

from .domain import (
    ActivityEvent,
    ActivitySpec,
    KnowledgeComponent,
    Question,
    RosterEntry,
    StructuralError,
    validate_event,
)

logger = logging.getLogger(__name__)


class SchemaError(ValueError):
    """A mapped column is missing from the file header."""

    def __init__(self, column: str):
        super().__init__(f"missing column {column!r}")
        self.column = column


class SourceFormat(str, enum.Enum):
    GENERIC = "generic"
    ASSISTMENTS = "assistments"


@dataclass(frozen=True)
class ColumnMapping:
    """Binds file columns to event fields for one source format."""

    format: SourceFormat
    student: str
    question: str
    kc: str
    correct: str
    event_type: str | None = None  # generic only
    hint_count: str | None = None  # assistments only
    order: str | None = None
    timestamp: str | None = None  # generic only, optional

    @classmethod
    def generic(cls) -> "ColumnMapping":
        return cls(
            format=SourceFormat.GENERIC,
            student="student_id",
            question="question_id",
            kc="kc",
            correct="correct",
            event_type="event_type",
            timestamp="timestamp_ms",
        )

    @classmethod
    def assistments(cls) -> "ColumnMapping":
        return cls(
            format=SourceFormat.ASSISTMENTS,
            student="user_id",
            question="problem_id",
            kc="skill_name",
            correct="correct",
            hint_count="hint_count",
            order="order_id",
        )

    def required_columns(self) -> list[str]:
        cols = [self.student, self.question, self.kc, self.correct]
        if self.format is SourceFormat.GENERIC:
            cols.append(self.event_type)
        else:
            cols.extend([self.hint_count, self.order])
        return [c for c in cols if c]


@dataclass(frozen=True)
class RowError:
    row: int
    reason: str


@dataclass(frozen=True)
class ParseResult:
    spec: ActivitySpec
    events: tuple[ActivityEvent, ...]
    row_errors: tuple[RowError, ...] = ()


def for_format(fmt: SourceFormat | str) -> ColumnMapping:
    fmt = SourceFormat(fmt)
    return ColumnMapping.generic() if fmt is SourceFormat.GENERIC else ColumnMapping.assistments()


def _ordering_key(row: dict, mapping: ColumnMapping, position: int) -> tuple:
    col = mapping.order or mapping.timestamp
    if col and row.get(col, "") not in ("", None):
        try:
            return (0, float(row[col]), position)
        except ValueError:
            return (1, 0.0, position)
    return (1, 0.0, position)


def parse_events(path: str | Path, mapping: ColumnMapping) -> ParseResult:
    """Parse a delimited file into an activity spec and an ordered event list.

    Rows are ordered by the mapping's ordering column (file order as the
    fallback). The spec is synthesized from the distinct students, questions,
    and KCs encountered. Unparseable rows are recorded and skipped.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in mapping.required_columns():
            if col not in header:
                raise SchemaError(col)
        rows = [(pos, row) for pos, row in enumerate(reader, start=2)]

    rows.sort(key=lambda pr: _ordering_key(pr[1], mapping, pr[0]))

    kcs: dict[str, KnowledgeComponent] = {}
    questions: dict[str, Question] = {}
    roster: dict[str, RosterEntry] = {}
    events: list[ActivityEvent] = []
    errors: list[RowError] = []
    hint_counts: dict[tuple[str, str], int] = {}

    def register(row: dict) -> tuple[str, str]:
        sid = row[mapping.student].strip()
        qid = row[mapping.question].strip()
        kc = row[mapping.kc].strip()
        if not sid or not qid or not kc:
            raise ValueError("empty id cell")
        if kc not in kcs:
            kcs[kc] = KnowledgeComponent(id=kc, name=kc)
        if qid not in questions:
            questions[qid] = Question(id=qid, kc_id=kc)
        elif questions[qid].kc_id != kc:
            raise ValueError(f"question {qid!r} re-tagged from {questions[qid].kc_id!r} to {kc!r}")
        if sid not in roster:
            roster[sid] = RosterEntry(id=sid, name=sid)
        return sid, qid

    def parse_correct(cell: str) -> bool:
        v = cell.strip()
        if v not in ("0", "1"):
            raise ValueError(f"correctness must be 0 or 1, got {cell!r}")
        return v == "1"

    for line_no, row in rows:
        try:
            if mapping.format is SourceFormat.GENERIC:
                kind = (row[mapping.event_type] or "").strip().lower()
                if kind == "response":
                    sid, qid = register(row)
                    events.append(ActivityEvent.response(sid, qid, parse_correct(row[mapping.correct])))
                elif kind == "hint":
                    sid, qid = register(row)
                    ordinal = hint_counts.get((sid, qid), 0) + 1
                    hint_counts[(sid, qid)] = ordinal
                    events.append(ActivityEvent.hint(sid, qid, ordinal))
                else:
                    raise ValueError(f"unknown event type {row[mapping.event_type]!r}")
            else:
                sid, qid = register(row)
                correct = parse_correct(row[mapping.correct])
                n_hints = int(row[mapping.hint_count].strip() or 0)
                if n_hints < 0:
                    raise ValueError(f"negative hint count {n_hints}")
                events.append(ActivityEvent.response(sid, qid, correct))
                for ordinal in range(1, n_hints + 1):
                    events.append(ActivityEvent.hint(sid, qid, ordinal))
        except (ValueError, KeyError) as exc:
            logger.warning("skipping row %d: %s", line_no, exc)
            errors.append(RowError(row=line_no, reason=str(exc)))

    spec = ActivitySpec(
        kcs=tuple(kcs.values()),
        questions=tuple(questions.values()),
        roster=tuple(roster.values()),
    )
    return ParseResult(spec=spec, events=tuple(events), row_errors=tuple(errors))


@dataclass(frozen=True)
class ReplayPlan:
    """Uniformly spaced re-emission of an event list.

    Event i is due at t0 + i * gap / speed. Source files at demo scale lack
    usable timestamps, so a synthetic uniform gap stands in for real pacing.
    """

    events: tuple[ActivityEvent, ...]
    inter_event_gap_ms: int = 1000
    speed: float = 1.0

    def __post_init__(self) -> None:
        if self.speed <= 0:
            raise StructuralError("replay speed must be positive")
        if self.inter_event_gap_ms < 0:
            raise StructuralError("inter-event gap must be non-negative")

    def due_at_ms(self, index: int) -> float:
        return index * self.inter_event_gap_ms / self.speed


@dataclass(frozen=True)
class ReplayReport:
    delivered: int
    aborted_at: int | None
    duration_ms: float
    max_drift_ms: float
    mean_drift_ms: float
    error: str | None = None


def replay(
    plan: ReplayPlan,
    sink: Callable[[ActivityEvent], object],
    clock: Callable[[], float] | None = None,
    sleep: Callable[[float], None] | None = None,
) -> ReplayReport:
    """Deliver the plan's events to the sink on schedule, in order.

    The sink acknowledges each event; a False return (or an exception) aborts
    the replay at that position. Scheduling is absolute against the start
    time, so per-event jitter does not accumulate. ``clock``/``sleep`` are
    injectable for tests and default to the wall clock.
    """
    now = clock if clock is not None else time.monotonic
    pause = sleep if sleep is not None else time.sleep

    t0 = now()
    drifts: list[float] = []
    delivered = 0
    aborted_at: int | None = None
    error: str | None = None
    for i, event in enumerate(plan.events):
        target = t0 + plan.due_at_ms(i) / 1000.0
        wait = target - now()
        if wait > 0:
            pause(wait)
        drifts.append(max(0.0, (now() - target) * 1000.0))
        try:
            ack = sink(event)
        except Exception as exc:  # sink rejected the event
            aborted_at = i
            error = str(exc)
            logger.warning("replay aborted at event %d: %s", i, exc)
            break
        if ack is False:
            aborted_at = i
            break
        delivered += 1
    return ReplayReport(
        delivered=delivered,
        aborted_at=aborted_at,
        duration_ms=(now() - t0) * 1000.0,
        max_drift_ms=max(drifts) if drifts else 0.0,
        mean_drift_ms=sum(drifts) / len(drifts) if drifts else 0.0,
        error=error,
    )


def activity_spec_from_dict(raw: dict) -> ActivitySpec:
    """Build an ActivitySpec from its JSON form (see ``snapshots.spec_wire``)."""
    return ActivitySpec(
        kcs=tuple(KnowledgeComponent(kc["id"], kc["name"]) for kc in raw.get("kcs", [])),
        questions=tuple(Question(q["id"], q["kc_id"]) for q in raw.get("questions", [])),
        roster=tuple(RosterEntry(s["id"], s.get("name", s["id"])) for s in raw.get("roster", [])),
    )


def load_activity_spec(path: str | Path) -> ActivitySpec:
    import json

    with open(path, encoding="utf-8") as fh:
        return activity_spec_from_dict(json.load(fh))


class EventStore:
    """Append-only validated event log with a single logical writer.

    ``ingest`` assigns the next seq (starting at 1) and a timestamp in
    milliseconds since the stream epoch (the first ingested event). Readers
    take immutable snapshots identified by the seq high-water mark.
    """

    def __init__(self, spec: ActivitySpec, clock: Callable[[], float] | None = None):
        self.spec = spec
        self._clock = clock if clock is not None else time.monotonic
        self._lock = threading.Lock()
        self._events: list[ActivityEvent] = []
        self._epoch: float | None = None

    def ingest(self, event: ActivityEvent) -> ActivityEvent:
        validate_event(event, self.spec)
        with self._lock:
            now = self._clock()
            if self._epoch is None:
                self._epoch = now
            stamped = replace(
                event,
                seq=len(self._events) + 1,
                timestamp=int(round((now - self._epoch) * 1000.0)),
            )
            self._events.append(stamped)
        return stamped

    def snapshot(self) -> tuple[ActivityEvent, ...]:
        with self._lock:
            return tuple(self._events)

    @property
    def events_seen(self) -> int:
        with self._lock:
            return len(self._events)
