"""Shared fixtures: a small campus catalog, fixed clocks, seeded scenarios."""

from __future__ import annotations

from datetime import datetime, timedelta
from zoneinfo import ZoneInfo

import pytest

from flexdesk.booking import BookingService
from flexdesk.catalog import Catalog, Desk, Zone
from flexdesk.config import Config
from flexdesk.service import ServiceCore, seed_scenario
from flexdesk.simgen import desk_scale_spec, generate
from flexdesk.telemetry import SensorReading, TelemetryStore
from flexdesk.timeutil import UTC, ensure_utc

SGT = ZoneInfo("Asia/Singapore")


def local(y, m, d, hh, mm=0, ss=0) -> datetime:
    """An instant given in study-site local time, normalized to UTC."""
    return datetime(y, m, d, hh, mm, ss, tzinfo=SGT).astimezone(UTC)


@pytest.fixture
def config() -> Config:
    return Config()


def build_campus(catalog: Catalog, zones: int = 6, desks_per_zone: int = 6) -> None:
    for zi in range(1, zones + 1):
        zone_id = f"zone-{zi}"
        desk_ids = tuple(f"{zone_id}-desk-{di}" for di in range(1, desks_per_zone + 1))
        catalog.register_zone(
            Zone(
                zone_id=zone_id,
                building=f"building-{1 + (zi - 1) % 2}",
                floor=1 + (zi - 1) % 3,
                name=f"Flex Zone {zi}",
                sensor_id=f"sensor-{zi}",
                desk_ids=desk_ids,
            )
        )
        for di, desk_id in enumerate(desk_ids, start=1):
            catalog.register_desk(
                Desk(
                    desk_id=desk_id,
                    zone_id=zone_id,
                    label=f"Flex Zone {zi}/{di}",
                    qr_token=f"tok-{zi:02d}-{di:02d}",
                )
            )


@pytest.fixture
def campus() -> Catalog:
    catalog = Catalog()
    build_campus(catalog)
    return catalog


class FixedClock:
    def __init__(self, now: datetime):
        self.now = ensure_utc(now)

    def __call__(self) -> datetime:
        return self.now

    def advance(self, **kwargs) -> datetime:
        self.now = self.now + timedelta(**kwargs)
        return self.now


@pytest.fixture
def clock() -> FixedClock:
    # a Monday, 08:30 study-site time
    return FixedClock(local(2025, 3, 3, 8, 30))


@pytest.fixture
def booking(campus, config, clock) -> BookingService:
    return BookingService(campus, config, clock=clock)


@pytest.fixture
def telemetry(campus, config) -> TelemetryStore:
    return TelemetryStore(campus, config.tzinfo)


def mk_reading(zone_id="zone-1", ts=None, temp=24.1, rh=55.0, noise=52.0, lux=480.0,
               co2=620.0, tvoc=80.0, presence=True) -> SensorReading:
    return SensorReading(
        zone_id=zone_id,
        timestamp=ensure_utc(ts or local(2025, 3, 3, 9, 0)),
        temp_c=temp,
        rh_pct=rh,
        noise_db=noise,
        lux=lux,
        co2_ppm=co2,
        tvoc_ppb=tvoc,
        presence=presence,
    )


@pytest.fixture(scope="session")
def desk_scale():
    """One study-scale scenario seeded through the full command surface."""
    scenario = generate(desk_scale_spec(seed=7))
    core = ServiceCore(Config())
    seed_scenario(core, scenario)
    core.recompute_profiles()
    core.recompute_matrix(now=max(r.timestamp for r in scenario.readings))
    return scenario, core
