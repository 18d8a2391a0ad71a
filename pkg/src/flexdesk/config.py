"""Service configuration: one file, env-var overrides, dataclass in memory."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional
from zoneinfo import ZoneInfo

DIMENSIONS = ("thermal", "visual", "aural")

DEFAULT_WEIGHTS = {"thermal": 0.5, "visual": 0.25, "aural": 0.25}

# k is pinned for the thermal dimension; the other dimensions pick k by
# silhouette over K_SEARCH_RANGE.
DEFAULT_K = {"thermal": 4, "visual": None, "aural": None}

K_SEARCH_MAX = 8


@dataclass(frozen=True)
class Config:
    data_dir: str = "./data"
    timezone: str = "Asia/Singapore"
    operating_hours: tuple[int, int] = (8, 18)
    grace_min: int = 15
    session_minutes: int = 120
    prompt_spacing_min: int = 30
    join_tolerance_s: int = 300
    min_votes: int = 6
    weights: dict = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    k_defaults: dict = field(default_factory=lambda: dict(DEFAULT_K))
    seed: int = 42
    restarts: int = 50
    matrix_window_days: int = 14
    min_band_samples: int = 10
    catalog_seed: Optional[str] = None

    @property
    def tzinfo(self) -> ZoneInfo:
        return ZoneInfo(self.timezone)

    def validate(self) -> "Config":
        lo, hi = self.operating_hours
        if not (0 <= lo < hi <= 24):
            raise ValueError(f"bad operating hours: {self.operating_hours}")
        if self.grace_min < 0 or self.join_tolerance_s <= 0:
            raise ValueError("grace_min must be >= 0 and join_tolerance_s > 0")
        if self.min_votes < 1:
            raise ValueError("min_votes must be >= 1")
        if set(self.weights) != set(DIMENSIONS) or any(w < 0 for w in self.weights.values()):
            raise ValueError(f"weights must cover {DIMENSIONS} and be non-negative")
        if sum(self.weights.values()) <= 0:
            raise ValueError("weights must not all be zero")
        ZoneInfo(self.timezone)  # raises for unknown zones
        return self


_ENV_PREFIX = "FLEXDESK_"

_SCALAR_FIELDS = {
    "data_dir": str,
    "timezone": str,
    "grace_min": int,
    "session_minutes": int,
    "prompt_spacing_min": int,
    "join_tolerance_s": int,
    "min_votes": int,
    "seed": int,
    "restarts": int,
    "matrix_window_days": int,
    "min_band_samples": int,
    "catalog_seed": str,
}


def load_config(path: Optional[str] = None, env: Optional[dict] = None) -> Config:
    """Build a Config from an optional JSON file plus FLEXDESK_* env overrides."""
    raw: dict = {}
    if path is not None:
        raw = json.loads(Path(path).read_text())
    cfg = Config()
    known = {}
    for key, value in raw.items():
        if key == "operating_hours":
            known[key] = (int(value[0]), int(value[1]))
        elif key in ("weights", "k_defaults"):
            merged = dict(getattr(cfg, key))
            merged.update(value)
            known[key] = merged
        elif key in _SCALAR_FIELDS:
            known[key] = _SCALAR_FIELDS[key](value)
        else:
            raise ValueError(f"unknown config key: {key}")
    cfg = replace(cfg, **known)

    env = os.environ if env is None else env
    overrides = {}
    for name, caster in _SCALAR_FIELDS.items():
        var = _ENV_PREFIX + name.upper()
        if var in env:
            overrides[name] = caster(env[var])
    if _ENV_PREFIX + "OPERATING_HOURS" in env:
        lo, hi = env[_ENV_PREFIX + "OPERATING_HOURS"].split("-")
        overrides["operating_hours"] = (int(lo), int(hi))
    if overrides:
        cfg = replace(cfg, **overrides)
    return cfg.validate()
