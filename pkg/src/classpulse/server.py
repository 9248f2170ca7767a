"""HTTP + server-push API around a debounced recompute loop.

The :class:`Hub` owns the event store, the snapshot ring, the debounce
policy, and the push subscribers. Ingestion is the single write path;
recomputation runs off it (triggered by the debounce driver) and publishes
immutable snapshots by atomic reference swap, so readers never see a torn
snapshot and never block writers.

Debounce semantics: the first event after an idle period triggers an
immediate recompute (leading edge); further events coalesce into one
trailing recompute scheduled an interval after the last fire, so a burst
costs at most two recomputes and the final snapshot always covers the last
event.
"""

from __future__ import annotations

import json
import logging
import math
import queue
import threading
import time
from collections import deque
from typing import Callable

from fastapi import Body, FastAPI, HTTPException
from fastapi.responses import StreamingResponse

from .config import ServerConfig
from .domain import ActivityEvent, ActivitySpec, EventKind, StructuralError, ValidationError
from .ingest import EventStore
from .snapshots import AnalyticsSnapshot, recompute, snapshot_wire, spec_wire

logger = logging.getLogger(__name__)

_SUBSCRIBER_QUEUE_SIZE = 32


class DebouncePolicy:
    """Pure decision core for coalescing recomputes; callers provide the clock."""

    def __init__(self, interval_ms: float):
        if interval_ms < 0:
            raise StructuralError("debounce interval must be non-negative")
        self.interval_ms = interval_ms
        self._dirty = False
        self._timer_at: float | None = None
        self._last_fire = -math.inf

    def on_event(self, now_ms: float) -> float | None:
        """Note an ingested event; returns a fire time when a timer is needed."""
        self._dirty = True
        if self._timer_at is not None:
            return None
        self._timer_at = max(now_ms, self._last_fire + self.interval_ms)
        return self._timer_at

    def on_fire(self, now_ms: float) -> bool:
        """Timer callback: True when a recompute should run now."""
        self._timer_at = None
        if not self._dirty:
            return False
        self._dirty = False
        self._last_fire = now_ms
        return True


class Subscription:
    """One push subscriber: a bounded queue of published snapshot versions."""

    def __init__(self, maxsize: int = _SUBSCRIBER_QUEUE_SIZE):
        self.queue: queue.Queue[int | None] = queue.Queue(maxsize=maxsize)
        self.closed = threading.Event()

    def push(self, version: int) -> bool:
        if self.closed.is_set():
            return False
        try:
            self.queue.put_nowait(version)
            return True
        except queue.Full:
            # Slow subscriber: disconnect; the client resumes via reconnect,
            # picking up the current snapshot immediately.
            self.close()
            return False

    def close(self) -> None:
        self.closed.set()


class Hub:
    """Single-writer event log + debounced recompute + snapshot publication."""

    def __init__(
        self,
        spec: ActivitySpec,
        config: ServerConfig,
        now_ms: Callable[[], float] | None = None,
        wall_ms: Callable[[], int] | None = None,
    ):
        self.spec = spec
        self.config = config
        self._now_ms = now_ms if now_ms is not None else (lambda: time.monotonic() * 1000.0)
        self._wall_ms = wall_ms if wall_ms is not None else (lambda: int(time.time() * 1000))
        self.store = EventStore(spec, clock=lambda: self._now_ms() / 1000.0)
        self.policy = DebouncePolicy(config.debounce_ms)
        self.on_schedule: Callable[[float], None] | None = None
        self._policy_lock = threading.Lock()
        self._publish_lock = threading.Lock()
        self._recompute_lock = threading.Lock()
        self._ring: deque[AnalyticsSnapshot] = deque(maxlen=config.snapshot_history)
        self._current: AnalyticsSnapshot | None = None
        self._subscribers: list[Subscription] = []
        self._sub_lock = threading.Lock()

    # -- lifecycle ---------------------------------------------------------

    def start(self) -> None:
        """Publish the initial (possibly empty) snapshot so reads always resolve."""
        if self._current is None:
            self.recompute_and_publish()

    # -- ingestion ---------------------------------------------------------

    def ingest(self, event: ActivityEvent) -> ActivityEvent:
        stamped = self.store.ingest(event)
        with self._policy_lock:
            fire_at = self.policy.on_event(self._now_ms())
        if fire_at is not None and self.on_schedule is not None:
            self.on_schedule(fire_at)
        return stamped

    def ingest_wire(self, payload: dict) -> ActivityEvent:
        """Accept one generic-format event from the HTTP API."""
        try:
            sid = str(payload["student_id"])
            qid = str(payload["question_id"])
            kind = str(payload["event_type"]).lower()
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"missing event field: {exc}")
        if kind == EventKind.RESPONSE.value:
            correct = payload.get("correct")
            if correct in (0, 1):
                correct = bool(correct)
            if not isinstance(correct, bool):
                raise ValidationError("response events need correct in {0, 1}")
            event = ActivityEvent.response(sid, qid, correct)
        elif kind == EventKind.HINT.value:
            ordinal = payload.get("hint_ordinal")
            if ordinal is None:
                ordinal = 1 + sum(
                    1
                    for e in self.store.snapshot()
                    if e.kind is EventKind.HINT and e.student_id == sid and e.question_id == qid
                )
            if not isinstance(ordinal, int) or ordinal < 1:
                raise ValidationError("hint_ordinal must be a positive integer")
            event = ActivityEvent.hint(sid, qid, ordinal)
        else:
            raise ValidationError(f"unknown event type {payload.get('event_type')!r}")
        return self.ingest(event)

    # -- recompute / publish -------------------------------------------------

    def fire(self) -> None:
        with self._policy_lock:
            should = self.policy.on_fire(self._now_ms())
        if should:
            self.recompute_and_publish()

    def recompute_and_publish(self) -> AnalyticsSnapshot:
        with self._recompute_lock:
            log = self.store.snapshot()
            previous = self._current
            version = (previous.version if previous else 0) + 1
            snapshot = recompute(
                log,
                self.spec,
                self.config,
                version=version,
                previous=previous,
                computed_at_ms=self._wall_ms(),
            )
            self._publish(snapshot)
            return snapshot

    def _publish(self, snapshot: AnalyticsSnapshot) -> None:
        with self._publish_lock:
            self._ring.append(snapshot)
            self._current = snapshot
        with self._sub_lock:
            subscribers = list(self._subscribers)
        for sub in subscribers:
            if not sub.push(snapshot.version):
                self.unsubscribe(sub)

    # -- reads ---------------------------------------------------------------

    def latest(self) -> AnalyticsSnapshot:
        snap = self._current
        if snap is None:
            raise StructuralError("no snapshot published yet")
        return snap

    def get_version(self, version: int) -> AnalyticsSnapshot | None:
        with self._publish_lock:
            for snap in self._ring:
                if snap.version == version:
                    return snap
        return None

    # -- push ------------------------------------------------------------------

    def subscribe(self) -> Subscription:
        sub = Subscription()
        with self._sub_lock:
            self._subscribers.append(sub)
        current = self._current
        if current is not None:
            sub.push(current.version)
        return sub

    def unsubscribe(self, sub: Subscription) -> None:
        sub.close()
        with self._sub_lock:
            if sub in self._subscribers:
                self._subscribers.remove(sub)

    def close(self) -> None:
        with self._sub_lock:
            subs = list(self._subscribers)
            self._subscribers.clear()
        for sub in subs:
            sub.close()


class TimerDriver:
    """Wall-clock debounce driver: one outstanding threading.Timer at a time."""

    def __init__(self, hub: Hub):
        self._hub = hub
        self._lock = threading.Lock()
        self._timer: threading.Timer | None = None
        self._closed = False
        hub.on_schedule = self.schedule

    def schedule(self, fire_at_ms: float) -> None:
        delay = max(0.0, (fire_at_ms - self._hub._now_ms()) / 1000.0)
        with self._lock:
            if self._closed:
                return
            timer = threading.Timer(delay, self._hub.fire)
            timer.daemon = True
            timer.start()
            self._timer = timer

    def close(self) -> None:
        with self._lock:
            self._closed = True
            if self._timer is not None:
                self._timer.cancel()


def create_app(hub: Hub) -> FastAPI:
    """The HTTP JSON + SSE contract over a hub."""
    app = FastAPI(title="classpulse", version="0.1.0")

    @app.post("/api/events", status_code=202)
    def post_event(payload: dict = Body(...)):
        try:
            stamped = hub.ingest_wire(payload)
        except (ValidationError, StructuralError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"seq": stamped.seq}

    @app.get("/api/snapshot")
    def get_snapshot():
        return snapshot_wire(hub.latest(), hub.spec)

    @app.get("/api/snapshot/{version}")
    def get_snapshot_version(version: int):
        snap = hub.get_version(version)
        if snap is None:
            raise HTTPException(status_code=404, detail=f"version {version} not retained")
        return snapshot_wire(snap, hub.spec)

    @app.get("/api/clustering")
    def get_clustering():
        wire = snapshot_wire(hub.latest(), hub.spec)
        return {"version": wire["version"], "clustering": wire["clustering"]}

    @app.get("/api/kpis")
    def get_kpis():
        wire = snapshot_wire(hub.latest(), hub.spec)
        return {"version": wire["version"], "kpis": wire["kpis"]}

    @app.get("/api/alerts")
    def get_alerts():
        wire = snapshot_wire(hub.latest(), hub.spec)
        return {"version": wire["version"], "alerts": wire["alerts"]}

    @app.get("/api/spec")
    def get_spec():
        return spec_wire(hub.spec)

    @app.get("/api/stream")
    def stream(limit: int | None = None):
        # `limit` caps the number of events before the stream closes; handy
        # for curl and for test clients that buffer whole responses.
        sub = hub.subscribe()

        def gen():
            sent = 0
            try:
                while limit is None or sent < limit:
                    try:
                        version = sub.queue.get(timeout=0.5)
                    except queue.Empty:
                        if sub.closed.is_set():
                            return
                        continue
                    if version is None:
                        return
                    yield f"data: {json.dumps({'version': version})}\n\n"
                    sent += 1
            finally:
                hub.unsubscribe(sub)

        return StreamingResponse(
            gen(),
            media_type="text/event-stream",
            headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
        )

    ui_dir = hub.config.ui_dir
    if ui_dir:
        from pathlib import Path

        if Path(ui_dir).is_dir():
            from fastapi.staticfiles import StaticFiles

            app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")
        else:
            logger.warning("ui_dir %s does not exist; serving API only", ui_dir)

    return app
