"""Hub orchestration: debounce, publication, HTTP contract, config, CLI."""

import json
import queue
import socket
import threading
import time

import httpx
import pytest
from fastapi.testclient import TestClient

from classpulse.config import ServerConfig
from classpulse.domain import StructuralError
from classpulse import clustering
from classpulse.server import DebouncePolicy, Hub, Subscription, create_app
from classpulse.snapshots import REASON_DEGENERATE, REASON_TOO_FEW, recompute
from classpulse import cli
from conftest import build_spec, hint, resp


class SimHarness:
    """Hub on a simulated clock; scheduled debounce fires run on advance()."""

    def __init__(self, spec=None, **config_kw):
        config_kw.setdefault("debounce_ms", 2000)
        self.config = ServerConfig(**config_kw)
        self.now = 0.0
        self.hub = Hub(
            spec or build_spec(),
            self.config,
            now_ms=lambda: self.now,
            wall_ms=lambda: int(self.now),
        )
        self.pending: list[float] = []
        self.hub.on_schedule = self.pending.append
        self.hub.start()

    def advance(self, ms: float) -> None:
        target = self.now + ms
        while True:
            due = sorted(t for t in self.pending if t <= target)
            if not due:
                break
            t = due[0]
            self.pending.remove(t)
            self.now = max(self.now, t)
            self.hub.fire()
        self.now = target


# -- debounce policy -----------------------------------------------------------


def test_policy_single_event_fires_once_within_interval():
    policy = DebouncePolicy(2000)
    fire_at = policy.on_event(0.0)
    assert fire_at == 0.0  # idle stream: leading edge fires immediately
    assert policy.on_fire(fire_at) is True
    assert policy.on_fire(2000.0) is False  # nothing pending


def test_policy_coalesces_burst_to_two_fires():
    policy = DebouncePolicy(2000)
    fires = []
    t = policy.on_event(0.0)
    assert t == 0.0
    assert policy.on_fire(0.0)
    fires.append(0.0)
    for ms in range(10, 1500, 10):  # burst within the interval
        scheduled = policy.on_event(float(ms))
        if scheduled is not None:
            assert scheduled == 2000.0  # trailing edge one interval after last fire
    assert policy.on_fire(2000.0)
    fires.append(2000.0)
    assert len(fires) == 2


def test_policy_zero_events_zero_fires():
    policy = DebouncePolicy(2000)
    assert policy.on_fire(0.0) is False


def test_policy_rejects_negative_interval():
    with pytest.raises(StructuralError):
        DebouncePolicy(-1)


def test_harness_single_event(spec):
    h = SimHarness()
    base_version = h.hub.latest().version
    h.hub.ingest(resp("s1", "q1", True))
    h.advance(2000)
    assert h.hub.latest().version == base_version + 1
    assert h.hub.latest().events_seen == 1


def test_harness_burst_coalesced():
    h = SimHarness()
    base_version = h.hub.latest().version
    for i in range(100):
        h.hub.ingest(resp("s1", "q1", bool(i % 2)))
        h.advance(5)
    h.advance(5000)
    final = h.hub.latest()
    assert final.events_seen == 100
    assert final.version - base_version <= 2  # leading + trailing


def test_harness_every_event_covered_within_interval_of_quiescence():
    h = SimHarness()
    h.hub.ingest(resp("s1", "q1", True))
    h.advance(100)
    h.hub.ingest(resp("s2", "q1", False))
    last_event_at = h.now
    h.advance(2000)  # exactly one interval after the last event
    assert h.now == last_event_at + 2000
    assert h.hub.latest().events_seen == 2


def test_harness_zero_events_only_initial_snapshot():
    h = SimHarness()
    h.advance(10000)
    assert h.hub.latest().version == 1
    assert h.hub.latest().events_seen == 0


# -- publication ---------------------------------------------------------------


def test_subscriber_gets_one_notification_per_publish():
    h = SimHarness()
    sub = h.hub.subscribe()
    assert sub.queue.get_nowait() == h.hub.latest().version  # immediate current version
    before = h.hub.latest().version
    h.hub.recompute_and_publish()
    assert sub.queue.get_nowait() == before + 1
    with pytest.raises(queue.Empty):
        sub.queue.get_nowait()


def test_late_subscriber_sees_current_version_immediately():
    h = SimHarness()
    for _ in range(5):
        h.hub.recompute_and_publish()
    sub = h.hub.subscribe()
    assert sub.queue.get_nowait() >= 5


def test_subscribers_see_strictly_increasing_versions():
    h = SimHarness()
    subs = [h.hub.subscribe() for _ in range(3)]
    for _ in range(6):
        h.hub.recompute_and_publish()
    for sub in subs:
        versions = []
        while True:
            try:
                versions.append(sub.queue.get_nowait())
            except queue.Empty:
                break
        assert versions == sorted(set(versions))
        assert all(b > a for a, b in zip(versions, versions[1:]))


def test_slow_subscriber_disconnected_not_blocking():
    h = SimHarness()
    sub = h.hub.subscribe()
    for _ in range(40):  # overflow the bounded queue
        h.hub.recompute_and_publish()
    assert sub.closed.is_set()
    # hub keeps publishing fine afterwards
    h.hub.recompute_and_publish()


def test_subscription_push_after_close_is_noop():
    sub = Subscription(maxsize=2)
    sub.close()
    assert sub.push(1) is False


# -- recompute ------------------------------------------------------------------


def demo_config(**kw):
    return ServerConfig(**kw)


def test_recompute_zero_events(spec):
    snap = recompute([], spec, demo_config(), version=1)
    assert snap.kpis.min_score is None
    assert snap.clustering is None
    assert snap.clustering_absent_reason == REASON_TOO_FEW
    assert snap.recommendations == ()
    assert snap.events_seen == 0


def test_recompute_one_active_student(spec):
    log = [resp("s1", "q1", False, seq=1)]
    snap = recompute(log, spec, demo_config(), version=1)
    assert snap.kpis.min_score == 0.0
    assert snap.clustering is None
    assert snap.clustering_absent_reason == REASON_TOO_FEW


def test_recompute_degenerate_features(spec):
    # two active students, both all-correct and hint-free: all-zero features
    log = [resp("s1", "q1", True, seq=1), resp("s2", "q1", True, seq=2)]
    snap = recompute(log, spec, demo_config(), version=1)
    assert snap.clustering is None
    assert snap.clustering_absent_reason == REASON_DEGENERATE
    assert snap.kpis.max_score == 100.0


def test_recompute_full_pipeline(spec):
    log = [
        resp("s1", "q1", False, seq=1), hint("s1", "q1", 1, seq=2),
        resp("s2", "q1", True, seq=3), resp("s2", "q2", True, seq=4),
        resp("s3", "q3", False, seq=5), hint("s3", "q3", 1, seq=6),
        resp("s4", "q4", True, seq=7),
    ]
    snap = recompute(log, spec, demo_config(), version=3)
    view = snap.clustering
    assert view is not None
    assert set(view.acs) == {"single", "complete", "average", "ward"}
    assert view.selected.value in view.acs
    assert view.model.ac == max(view.acs.values())
    assert view.dendrogram.leaf_count() == 4
    assert len(snap.recommendations) == view.k
    assert snap.version == 3
    assert not snap.degraded


def test_recompute_fixed_k(spec):
    log = [
        resp("s1", "q1", False, seq=1),
        resp("s2", "q2", True, seq=2),
        resp("s3", "q1", True, seq=3),
    ]
    snap = recompute(log, spec, demo_config(k=2), version=1)
    assert snap.clustering.k == 2
    assert snap.clustering.k_policy == "fixed"


def test_recompute_fixed_k_clamped_to_n(spec):
    log = [resp("s1", "q1", False, seq=1), resp("s2", "q2", True, seq=2)]
    snap = recompute(log, spec, demo_config(k=9), version=1)
    assert snap.clustering.k == 2
    assert snap.clustering.k_flagged


def test_recompute_numeric_failure_degrades_and_retains(spec, monkeypatch):
    log = [resp("s1", "q1", False, seq=1), resp("s2", "q1", True, seq=2),
           resp("s3", "q2", False, seq=3)]
    healthy = recompute(log, spec, demo_config(), version=1)
    assert healthy.clustering is not None

    def boom(*args, **kwargs):
        raise FloatingPointError("synthetic numeric failure")

    monkeypatch.setattr(clustering, "agnes", boom)
    degraded = recompute(log, spec, demo_config(), version=2, previous=healthy)
    assert degraded.degraded
    assert "synthetic numeric failure" in degraded.error
    assert degraded.clustering is healthy.clustering  # previous result retained
    assert degraded.version == 2


# -- HTTP contract -----------------------------------------------------------------


@pytest.fixture
def client_hub():
    h = SimHarness()
    app = create_app(h.hub)
    return TestClient(app), h


def test_post_event_accepted(client_hub):
    client, h = client_hub
    response = client.post(
        "/api/events",
        json={"student_id": "s1", "question_id": "q1", "event_type": "response", "correct": 1},
    )
    assert response.status_code == 202
    assert response.json() == {"seq": 1}


def test_post_hint_without_ordinal_autonumbers(client_hub):
    client, h = client_hub
    for expected in (1, 2):
        response = client.post(
            "/api/events",
            json={"student_id": "s1", "question_id": "q1", "event_type": "hint"},
        )
        assert response.status_code == 202
    events = h.hub.store.snapshot()
    assert [e.hint_ordinal for e in events] == [1, 2]


def test_post_event_validation_errors(client_hub):
    client, _ = client_hub
    bad = [
        {"student_id": "ghost", "question_id": "q1", "event_type": "response", "correct": 1},
        {"student_id": "s1", "question_id": "q99", "event_type": "response", "correct": 0},
        {"student_id": "s1", "question_id": "q1", "event_type": "response"},
        {"student_id": "s1", "question_id": "q1", "event_type": "telepathy"},
        {"student_id": "s1"},
    ]
    for payload in bad:
        response = client.post("/api/events", json=payload)
        assert response.status_code == 422, payload


def test_get_snapshot_and_subviews(client_hub):
    client, h = client_hub
    wire = client.get("/api/snapshot").json()
    assert wire["version"] == 1
    assert wire["kpis"]["min_score"] is None
    assert wire["clustering"]["available"] is False

    assert client.get("/api/kpis").json()["kpis"]["events_seen"] == 0
    assert client.get("/api/alerts").json()["alerts"] == []
    assert client.get("/api/clustering").json()["clustering"]["reason"] == "insufficient_observations"

    spec_wire = client.get("/api/spec").json()
    assert len(spec_wire["questions"]) == 4
    assert len(spec_wire["roster"]) == 4


def test_get_snapshot_by_version(client_hub):
    client, h = client_hub
    h.hub.recompute_and_publish()
    assert client.get("/api/snapshot/1").json()["version"] == 1
    assert client.get("/api/snapshot/2").json()["version"] == 2
    assert client.get("/api/snapshot/999").status_code == 404


def test_snapshot_ring_drops_old_versions():
    h = SimHarness(snapshot_history=3)
    for _ in range(5):
        h.hub.recompute_and_publish()
    client = TestClient(create_app(h.hub))
    assert client.get("/api/snapshot/1").status_code == 404
    assert client.get("/api/snapshot/6").status_code == 200


def test_sse_stream_immediate_then_push(client_hub):
    # the TestClient buffers whole responses, so cap the stream at two events
    # and publish from a background thread while the request is in flight
    client, h = client_hub
    stop = threading.Event()

    def keep_publishing():
        while not stop.wait(0.2):
            h.hub.recompute_and_publish()

    publisher = threading.Thread(target=keep_publishing, daemon=True)
    publisher.start()
    try:
        response = client.get("/api/stream?limit=2")
    finally:
        stop.set()
        publisher.join(timeout=2)
    assert response.status_code == 200
    assert response.headers["content-type"].startswith("text/event-stream")
    versions = [json.loads(line[5:])["version"] for line in response.text.splitlines()
                if line.startswith("data:")]
    assert len(versions) == 2
    assert versions[0] >= 1
    assert versions[1] > versions[0]  # strictly increasing push sequence


def test_snapshot_readable_while_recompute_pending(client_hub):
    # reads return the last published snapshot, never a partial one
    client, h = client_hub
    h.hub.ingest(resp("s1", "q1", True))  # dirty, not yet recomputed
    wire = client.get("/api/snapshot").json()
    assert wire["version"] == 1
    assert wire["events_seen"] == 0


def free_port() -> int:
    with socket.socket() as s:
        s.bind(("127.0.0.1", 0))
        return s.getsockname()[1]


def test_sse_unbounded_stream_against_live_server():
    """Real uvicorn server: connect mid-stream, see the current version at
    once, push an event over HTTP, observe the debounced publish arrive."""
    import uvicorn

    from classpulse.server import TimerDriver

    hub = Hub(build_spec(), ServerConfig(debounce_ms=50))
    TimerDriver(hub)
    hub.start()
    port = free_port()
    server = uvicorn.Server(
        uvicorn.Config(create_app(hub), host="127.0.0.1", port=port, log_level="error")
    )
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.monotonic() + 10
    while not server.started:
        assert time.monotonic() < deadline, "server failed to start"
        time.sleep(0.02)

    base = f"http://127.0.0.1:{port}"
    try:
        with httpx.Client(timeout=10) as client:
            with client.stream("GET", f"{base}/api/stream") as response:
                lines = response.iter_lines()
                first = next(line for line in lines if line.startswith("data:"))
                assert json.loads(first[5:])["version"] == 1
                posted = client.post(
                    f"{base}/api/events",
                    json={"student_id": "s1", "question_id": "q1",
                          "event_type": "response", "correct": 1},
                )
                assert posted.status_code == 202
                second = next(line for line in lines if line.startswith("data:"))
                assert json.loads(second[5:])["version"] == 2
            latest = client.get(f"{base}/api/snapshot").json()
            assert latest["events_seen"] == 1
    finally:
        server.should_exit = True
        thread.join(timeout=5)


# -- config / CLI --------------------------------------------------------------------


def test_config_defaults_valid():
    config = ServerConfig()
    assert config.debounce_ms == 2000
    assert config.k == "auto"
    assert len(config.rules()) == 4


def test_config_validation():
    with pytest.raises(StructuralError):
        ServerConfig(port=0)
    with pytest.raises(StructuralError):
        ServerConfig(debounce_ms=-5)
    with pytest.raises(StructuralError):
        ServerConfig(k=0)
    with pytest.raises(StructuralError):
        ServerConfig(k="three")
    with pytest.raises(StructuralError):
        ServerConfig(histogram_bin_width=30)
    with pytest.raises(StructuralError):
        ServerConfig(replay_format="excel")


def test_config_from_file_and_overrides(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"port": 9001, "debounce_ms": 500, "k": 3}))
    config = ServerConfig.from_file(path)
    assert (config.port, config.debounce_ms, config.k) == (9001, 500, 3)
    merged = config.replaced(port=9002, k=None)
    assert (merged.port, merged.k) == (9002, 3)


def test_config_unknown_keys_rejected(tmp_path):
    path = tmp_path / "config.json"
    path.write_text(json.dumps({"prot": 9001}))
    with pytest.raises(StructuralError):
        ServerConfig.from_file(path)


def test_config_rule_thresholds_flow_through():
    config = ServerConfig(wrong_streak_length=4, hint_heavy_total=9)
    rules = {r.kind: r for r in config.rules()}
    from classpulse.recommend import AlertKind

    assert rules[AlertKind.WRONG_STREAK].streak_length == 4
    assert rules[AlertKind.HINT_HEAVY].hint_total == 9


def test_cli_parser_accepts_documented_flags(demo_csv):
    args = cli.build_parser().parse_args(
        ["serve", "--port", "9000", "--replay", str(demo_csv), "--format", "assistments",
         "--speed", "10", "--k", "auto", "--debounce-ms", "250"]
    )
    config = cli.load_config(args)
    assert config.port == 9000
    assert config.replay_format == "assistments"
    assert config.replay_speed == 10.0
    assert config.k == "auto"
    assert config.debounce_ms == 250


def test_cli_fixed_k_parsed(demo_csv):
    args = cli.build_parser().parse_args(["serve", "--replay", str(demo_csv), "--k", "4"])
    assert cli.load_config(args).k == 4


def test_cli_rejects_bad_k():
    with pytest.raises(SystemExit):
        cli.build_parser().parse_args(["serve", "--k", "several"])


def test_build_runtime_requires_a_source():
    with pytest.raises(StructuralError):
        cli.build_runtime(ServerConfig())


def test_build_runtime_with_activity_file(tmp_path):
    from classpulse.snapshots import spec_wire

    activity = tmp_path / "activity.json"
    activity.write_text(json.dumps(spec_wire(build_spec())))
    hub, app, plan = cli.build_runtime(ServerConfig(activity_file=str(activity)))
    assert plan is None
    client = TestClient(app)
    assert client.get("/api/snapshot").json()["version"] == 1
    response = client.post(
        "/api/events",
        json={"student_id": "s1", "question_id": "q1", "event_type": "response", "correct": 1},
    )
    assert response.status_code == 202
