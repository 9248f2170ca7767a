"""Server configuration: a flat dataclass mirrored by the JSON config file."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path

from .domain import StructuralError
from .ingest import SourceFormat
from .recommend import AlertRule, default_rules


@dataclass(frozen=True)
class ServerConfig:
    port: int = 8000
    replay_file: str | None = None
    replay_format: str = "generic"
    replay_speed: float = 1.0
    replay_gap_ms: int = 1000
    debounce_ms: int = 2000
    k: str | int = "auto"  # "auto" or a fixed cluster count >= 1
    histogram_bin_width: int = 10
    wrong_streak_length: int = 3
    hint_heavy_total: int = 5
    struggle_fraction: float = 0.5
    struggle_min_answers: int = 3
    low_median_percent: float = 60.0
    low_median_min_scores: int = 5
    snapshot_history: int = 50
    activity_file: str | None = None  # activity JSON for push-only mode (no replay)
    ui_dir: str | None = None

    def __post_init__(self) -> None:
        if not 1 <= self.port <= 65535:
            raise StructuralError(f"invalid port {self.port}")
        if self.debounce_ms < 0:
            raise StructuralError("debounce interval must be non-negative")
        if self.replay_speed <= 0:
            raise StructuralError("replay speed must be positive")
        if self.k != "auto":
            if not isinstance(self.k, int) or self.k < 1:
                raise StructuralError(f"k must be 'auto' or an integer >= 1, got {self.k!r}")
        if self.histogram_bin_width <= 0 or 100 % self.histogram_bin_width != 0:
            raise StructuralError("histogram bin width must divide 100")
        try:
            SourceFormat(self.replay_format)
        except ValueError:
            raise StructuralError(f"unknown replay format {self.replay_format!r}")
        if self.snapshot_history < 1:
            raise StructuralError("snapshot history must keep at least one snapshot")

    def rules(self) -> tuple[AlertRule, ...]:
        return default_rules(
            streak_length=self.wrong_streak_length,
            hint_total=self.hint_heavy_total,
            fraction=self.struggle_fraction,
            min_answers=self.struggle_min_answers,
            percentage=self.low_median_percent,
            min_scores=self.low_median_min_scores,
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "ServerConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        return cls.from_dict(raw)

    @classmethod
    def from_dict(cls, raw: dict) -> "ServerConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise StructuralError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)

    def replaced(self, **overrides) -> "ServerConfig":
        return dataclasses.replace(self, **{k: v for k, v in overrides.items() if v is not None})
