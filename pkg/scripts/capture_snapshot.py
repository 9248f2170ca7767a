#!/usr/bin/env python3
"""Replay the bundled demo instantly and dump the resulting snapshot JSON.

The output is the exact /api/snapshot wire form; the frontend test suite
uses it as a fixture, and it doubles as contract documentation.
"""

import argparse
import dataclasses
import json
from pathlib import Path

from classpulse.config import ServerConfig
from classpulse.ingest import ColumnMapping, parse_events
from classpulse.snapshots import recompute, snapshot_wire

REPO = Path(__file__).resolve().parent.parent


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--replay", type=Path, default=REPO / "data" / "demo_activity.csv")
    parser.add_argument("--out", type=Path,
                        default=REPO / "frontend" / "tests" / "fixtures" / "demo_snapshot.json")
    args = parser.parse_args()

    parsed = parse_events(args.replay, ColumnMapping.assistments())
    log = [
        dataclasses.replace(event, seq=seq, timestamp=(seq - 1) * 100)
        for seq, event in enumerate(parsed.events, start=1)
    ]
    snapshot = recompute(log, parsed.spec, ServerConfig(), version=1, computed_at_ms=0)
    wire = snapshot_wire(snapshot, parsed.spec)

    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(json.dumps(wire, indent=2) + "\n", encoding="utf-8")
    clustering = wire["clustering"]
    print(f"wrote {args.out}")
    print(f"  events={wire['events_seen']} completed={wire['kpis']['completed_count']} "
          f"selected={clustering['selected']} k={clustering['k']} "
          f"recommendations={len(wire['recommendations'])} alerts={len(wire['alerts'])}")


if __name__ == "__main__":
    main()
