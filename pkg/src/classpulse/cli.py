"""Command line entry point: `classpulse serve`."""

from __future__ import annotations

import argparse
import logging
import sys
import threading
from pathlib import Path

from .config import ServerConfig
from .domain import StructuralError
from .ingest import ReplayPlan, for_format, load_activity_spec, parse_events, replay
from .server import Hub, TimerDriver, create_app

logger = logging.getLogger(__name__)


def _parse_k(value: str | None) -> str | int | None:
    if value is None:
        return None
    if value == "auto":
        return "auto"
    try:
        return int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"--k expects 'auto' or an integer, got {value!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="classpulse", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the dashboard API server")
    serve.add_argument("--port", type=int, help="listen port (default 8000)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--config", type=Path, help="JSON config file mirroring ServerConfig")
    serve.add_argument("--replay", type=Path, help="activity file to replay as a live stream")
    serve.add_argument("--format", choices=["generic", "assistments"], help="replay file format")
    serve.add_argument("--speed", type=float, help="replay speed multiplier (default 1.0)")
    serve.add_argument("--k", type=_parse_k, help="cluster count: 'auto' (silhouette) or fixed N")
    serve.add_argument("--debounce-ms", type=int, dest="debounce_ms")
    serve.add_argument("--ui-dir", type=Path, dest="ui_dir", help="static dashboard build to serve at /")
    return parser


def load_config(args: argparse.Namespace) -> ServerConfig:
    config = ServerConfig.from_file(args.config) if args.config else ServerConfig()
    return config.replaced(
        port=args.port,
        replay_file=str(args.replay) if args.replay else None,
        replay_format=args.format,
        replay_speed=args.speed,
        k=args.k,
        debounce_ms=args.debounce_ms,
        ui_dir=str(args.ui_dir) if args.ui_dir else None,
    )


def build_runtime(config: ServerConfig) -> tuple[Hub, "object", ReplayPlan | None]:
    """Assemble hub + app (+ replay plan) for a config; shared by CLI and tests."""
    plan = None
    if config.replay_file:
        result = parse_events(config.replay_file, for_format(config.replay_format))
        if result.row_errors:
            logger.warning("replay file: %d rows skipped", len(result.row_errors))
        spec = result.spec
        plan = ReplayPlan(
            events=result.events,
            inter_event_gap_ms=config.replay_gap_ms,
            speed=config.replay_speed,
        )
    elif config.activity_file:
        spec = load_activity_spec(config.activity_file)
    else:
        raise StructuralError("either a replay file or an activity file is required")

    hub = Hub(spec, config)
    TimerDriver(hub)
    hub.start()
    app = create_app(hub)

    if plan is not None:
        events = plan.events

        def run_replay():
            report = replay(plan, hub.ingest)
            logger.info(
                "replay finished: %d/%d events delivered, mean drift %.1f ms",
                report.delivered,
                len(events),
                report.mean_drift_ms,
            )

        @app.on_event("startup")
        def start_replay():
            thread = threading.Thread(target=run_replay, name="replay", daemon=True)
            thread.start()

    return hub, app, plan


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(asctime)s %(name)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args)
        hub, app, _ = build_runtime(config)
    except (StructuralError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    import uvicorn

    uvicorn.run(app, host=args.host, port=config.port, log_level="info")
    return 0


if __name__ == "__main__":
    sys.exit(main())
