"""Ingest and query seven-attribute IEQ sensor readings.

Each zone has one fixed sensor. Readings are stored per zone in timestamp
order; duplicate timestamps are replaced last-write-wins. Readings with a
channel outside its plausibility bounds are quarantined (kept with a reason,
never silently dropped) so ingestion stays auditable.
"""

from __future__ import annotations

import bisect
import csv
import threading
from dataclasses import dataclass
from datetime import datetime, time
from typing import IO, Optional
from zoneinfo import ZoneInfo

from .catalog import Catalog
from .errors import InvalidReading, InvalidWindow, UnknownZone
from .stats import mean, pstdev, quantile_linear
from .timeutil import ensure_utc, floor_second, parse_instant

# generous physical bounds for tropical offices
PLAUSIBILITY_BOUNDS = {
    "temp_c": (10.0, 45.0),
    "rh_pct": (0.0, 100.0),
    "noise_db": (20.0, 120.0),
    "lux": (0.0, 20000.0),
    "co2_ppm": (300.0, 10000.0),
    "tvoc_ppb": (0.0, 60000.0),
}

CHANNELS = ("temp_c", "rh_pct", "noise_db", "lux", "co2_ppm", "tvoc_ppb")

# dimensions summarized in zone profiles and used for matching
PROFILE_CHANNELS = ("temp_c", "lux", "noise_db")

QUANTILES = (0.10, 0.25, 0.50, 0.75, 0.90)

DEFAULT_HOURS = (8, 18)


@dataclass(frozen=True)
class SensorReading:
    zone_id: str
    timestamp: datetime  # UTC, second resolution
    temp_c: Optional[float]
    rh_pct: Optional[float]
    noise_db: Optional[float]
    lux: Optional[float]
    co2_ppm: Optional[float]
    tvoc_ppb: Optional[float]
    presence: Optional[bool]

    def channel(self, name: str) -> Optional[float]:
        return getattr(self, name)


@dataclass(frozen=True)
class IngestResult:
    accepted: bool
    reason: Optional[str] = None


@dataclass(frozen=True)
class DimensionStats:
    n: int
    mean: float
    std: float
    quantiles: dict  # {"p10": ..., ..., "p90": ...}


@dataclass(frozen=True)
class ZoneProfile:
    zone_id: str
    window: tuple[datetime, datetime]
    hours_filter: tuple[int, int]
    stats: dict  # channel -> DimensionStats | None (None when no samples)


def reading_from_dict(raw: dict) -> SensorReading:
    def num(key):
        v = raw.get(key)
        if v is None or v == "":
            return None
        return float(v)

    presence = raw.get("presence")
    if presence in (None, ""):
        presence_val = None
    elif isinstance(presence, bool):
        presence_val = presence
    else:
        text = str(presence).strip().lower()
        if text in ("true", "1", "yes"):
            presence_val = True
        elif text in ("false", "0", "no"):
            presence_val = False
        else:
            raise InvalidReading(f"unparseable presence value: {presence!r}")
    ts = raw["timestamp"]
    if isinstance(ts, str):
        ts = parse_instant(ts)
    return SensorReading(
        zone_id=raw["zone_id"],
        timestamp=floor_second(ensure_utc(ts)),
        temp_c=num("temp_c"),
        rh_pct=num("rh_pct"),
        noise_db=num("noise_db"),
        lux=num("lux"),
        co2_ppm=num("co2_ppm"),
        tvoc_ppb=num("tvoc_ppb"),
        presence=presence_val,
    )


def reading_to_dict(r: SensorReading) -> dict:
    from .timeutil import iso

    return {
        "zone_id": r.zone_id,
        "timestamp": iso(r.timestamp),
        "temp_c": r.temp_c,
        "rh_pct": r.rh_pct,
        "noise_db": r.noise_db,
        "lux": r.lux,
        "co2_ppm": r.co2_ppm,
        "tvoc_ppb": r.tvoc_ppb,
        "presence": r.presence,
    }


def out_of_bounds_reason(reading: SensorReading) -> Optional[str]:
    for name in CHANNELS:
        value = reading.channel(name)
        if value is None:
            continue  # missing channels stay explicit nulls, never fabricated
        lo, hi = PLAUSIBILITY_BOUNDS[name]
        if not (lo <= value <= hi):
            return f"{name}={value:g} out of [{lo:g}, {hi:g}]"
    return None


class TelemetryStore:
    """Per-zone time series with concurrent ingestion and consistent reads."""

    def __init__(self, catalog: Catalog, tz: ZoneInfo):
        self._catalog = catalog
        self._tz = tz
        self._lock = threading.RLock()
        self._times: dict[str, list[datetime]] = {}
        self._by_time: dict[str, dict[datetime, SensorReading]] = {}
        self.quarantine: list[tuple[SensorReading, str]] = []

    def _require_zone(self, zone_id: str) -> None:
        if not self._catalog.has_zone(zone_id):
            raise UnknownZone(zone_id)

    def ingest(self, reading: SensorReading) -> IngestResult:
        self._require_zone(reading.zone_id)
        reason = out_of_bounds_reason(reading)
        with self._lock:
            if reason is not None:
                self.quarantine.append((reading, reason))
                return IngestResult(accepted=False, reason=reason)
            times = self._times.setdefault(reading.zone_id, [])
            store = self._by_time.setdefault(reading.zone_id, {})
            ts = reading.timestamp
            if ts not in store:
                bisect.insort(times, ts)
            store[ts] = reading  # duplicate timestamps: last write wins
            return IngestResult(accepted=True)

    def import_csv(self, fp: IO[str]) -> tuple[int, int]:
        """Bulk import; returns (accepted, quarantined). Raises on malformed rows."""
        reader = csv.DictReader(fp)
        accepted = quarantined = 0
        for row in reader:
            result = self.ingest(reading_from_dict(row))
            if result.accepted:
                accepted += 1
            else:
                quarantined += 1
        return accepted, quarantined

    def query_window(self, zone_id: str, t0: datetime, t1: datetime) -> list[SensorReading]:
        t0, t1 = ensure_utc(t0), ensure_utc(t1)
        if t0 >= t1:
            raise InvalidWindow(f"empty window [{t0}, {t1})")
        self._require_zone(zone_id)
        with self._lock:
            times = self._times.get(zone_id, [])
            lo = bisect.bisect_left(times, t0)
            hi = bisect.bisect_left(times, t1)
            store = self._by_time.get(zone_id, {})
            return [store[ts] for ts in times[lo:hi]]

    def nearest_reading(
        self, zone_id: str, t: datetime, tolerance_s: float
    ) -> Optional[SensorReading]:
        """Reading minimizing |timestamp - t| within tolerance; ties go to the earlier one."""
        if tolerance_s <= 0:
            raise ValueError("tolerance_s must be positive")
        t = ensure_utc(t)
        self._require_zone(zone_id)
        with self._lock:
            times = self._times.get(zone_id, [])
            if not times:
                return None
            i = bisect.bisect_left(times, t)
            best = None
            best_delta = None
            if i > 0:
                best = times[i - 1]
                best_delta = (t - best).total_seconds()
            if i < len(times):
                delta = (times[i] - t).total_seconds()
                if best_delta is None or delta < best_delta:
                    best, best_delta = times[i], delta
            if best is None or best_delta > tolerance_s:
                return None
            return self._by_time[zone_id][best]

    def latest(self, zone_id: str) -> Optional[SensorReading]:
        self._require_zone(zone_id)
        with self._lock:
            times = self._times.get(zone_id, [])
            if not times:
                return None
            return self._by_time[zone_id][times[-1]]

    def _in_hours(self, ts: datetime, hours: tuple[int, int]) -> bool:
        local = ts.astimezone(self._tz)
        tod = local.hour * 60 + local.minute
        return hours[0] * 60 <= tod < hours[1] * 60

    def channel_samples(
        self,
        zone_id: str,
        window: tuple[datetime, datetime],
        channel: str,
        hours_filter: tuple[int, int] = DEFAULT_HOURS,
    ) -> list[float]:
        """Non-null channel values in the window whose local time-of-day is in hours_filter."""
        readings = self.query_window(zone_id, window[0], window[1])
        return [
            r.channel(channel)
            for r in readings
            if self._in_hours(r.timestamp, hours_filter) and r.channel(channel) is not None
        ]

    def zone_profile(
        self,
        zone_id: str,
        window: tuple[datetime, datetime],
        hours_filter: tuple[int, int] = DEFAULT_HOURS,
    ) -> ZoneProfile:
        stats: dict = {}
        for channel in PROFILE_CHANNELS:
            values = self.channel_samples(zone_id, window, channel, hours_filter)
            if not values:
                stats[channel] = None
                continue
            stats[channel] = DimensionStats(
                n=len(values),
                mean=mean(values),
                std=pstdev(values),
                quantiles={f"p{int(q * 100)}": quantile_linear(values, q) for q in QUANTILES},
            )
        return ZoneProfile(
            zone_id=zone_id,
            window=(ensure_utc(window[0]), ensure_utc(window[1])),
            hours_filter=hours_filter,
            stats=stats,
        )

    def all_readings(self) -> list[SensorReading]:
        """Every accepted reading, ordered by (zone_id, timestamp)."""
        with self._lock:
            out = []
            for zone_id in sorted(self._times):
                store = self._by_time[zone_id]
                out.extend(store[ts] for ts in self._times[zone_id])
            return out
