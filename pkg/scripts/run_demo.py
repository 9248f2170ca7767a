#!/usr/bin/env python3
"""Launch the live demo: replay the bundled activity file at 10x speed and
serve the dashboard API (plus the built frontend, if present) on port 8000.

Equivalent to:
    classpulse serve --replay data/demo_activity.csv --format assistments --speed 10
"""

import sys
from pathlib import Path

from classpulse.cli import main

REPO = Path(__file__).resolve().parent.parent

if __name__ == "__main__":
    ui = REPO / "frontend" / "dist"
    argv = [
        "serve",
        "--replay", str(REPO / "data" / "demo_activity.csv"),
        "--format", "assistments",
        "--speed", "10",
    ]
    if ui.is_dir():
        print(f"serving dashboard from {ui}")
        argv += ["--ui-dir", str(ui)]
    sys.exit(main(argv + sys.argv[1:]))
