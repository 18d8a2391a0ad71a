"""Synthetic desk-scale scenarios with planted comfort types.

Zones get stationary Gaussian climates; occupants get latent per-dimension
preference bands. A vote at condition x is "comfortable" inside the band and
points toward the band outside it; with probability `vote_noise` it is
replaced by a uniform random vote. Random-voter occupants (no band at all)
plant the hard-to-predict type. Everything is deterministic given the seed.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from datetime import date, datetime, time, timedelta
from typing import Optional
from zoneinfo import ZoneInfo

import numpy as np

from .catalog import Desk, Zone
from .clustering import adjusted_rand_index
from .errors import InvalidSpec
from .feedback import Dimension, Preference
from .profiling import ComfortClusterModel
from .telemetry import PLAUSIBILITY_BOUNDS, SensorReading
from .timeutil import UTC, floor_second

READING_CADENCE_MIN = 5

_TOKEN_ALPHABET = string.ascii_letters + string.digits + "-_"

# channels not tied to a comfort dimension still need plausible values
_BACKGROUND = {"rh_pct": (55.0, 4.0), "co2_ppm": (650.0, 60.0), "tvoc_ppb": (140.0, 30.0)}

_CHANNEL_FOR_DIM = {Dimension.THERMAL: "temp_c", Dimension.VISUAL: "lux", Dimension.AURAL: "noise_db"}


@dataclass(frozen=True)
class ZoneClimate:
    """Stationary per-zone Gaussian climate, one (mean, std) per dimension."""

    temp_mean: float
    temp_std: float
    lux_mean: float
    lux_std: float
    noise_mean: float
    noise_std: float

    def params(self, dimension: Dimension) -> tuple[float, float]:
        return {
            Dimension.THERMAL: (self.temp_mean, self.temp_std),
            Dimension.VISUAL: (self.lux_mean, self.lux_std),
            Dimension.AURAL: (self.noise_mean, self.noise_std),
        }[dimension]


@dataclass(frozen=True)
class LatentType:
    """An occupant's ground-truth preference: a band per dimension, or pure noise."""

    name: str
    bands: Optional[dict] = None  # Dimension -> (lo, hi); None for random voters
    random_voter: bool = False

    def band(self, dimension: Dimension) -> Optional[tuple[float, float]]:
        if self.bands is None:
            return None
        return self.bands.get(dimension)


@dataclass(frozen=True)
class ScenarioSpec:
    seed: int
    zones: tuple[ZoneClimate, ...]
    occupants: tuple[LatentType, ...]  # one latent type per occupant
    sessions_per_occupant: int
    votes_per_session: int
    vote_noise: float
    days: int = 30
    desks_per_zone: int = 6
    start: Optional[date] = None  # default: horizon ends today
    timezone: str = "Asia/Singapore"

    def validate(self) -> "ScenarioSpec":
        if not self.zones or not self.occupants:
            raise InvalidSpec("need at least one zone and one occupant")
        if not 0.0 <= self.vote_noise < 0.5:
            raise InvalidSpec("vote_noise must be in [0, 0.5)")
        if self.sessions_per_occupant < 1 or self.days < 1 or self.desks_per_zone < 1:
            raise InvalidSpec("sessions, days, and desks_per_zone must be positive")
        if not 1 <= self.votes_per_session <= 5:
            raise InvalidSpec("votes_per_session must be within a two-hour prompt schedule (1-5)")
        for occ in self.occupants:
            if occ.random_voter:
                continue
            if not occ.bands:
                raise InvalidSpec(f"type {occ.name} has no bands and is not a random voter")
            for dim, (lo, hi) in occ.bands.items():
                if lo >= hi:
                    raise InvalidSpec(f"type {occ.name} band for {dim} is empty")
        return self


@dataclass(frozen=True)
class GroundTruth:
    type_by_occupant: dict  # occupant_id -> type name
    hard_to_predict: frozenset  # occupant ids planted as random voters


@dataclass(frozen=True)
class SimReservation:
    reservation_id: str
    desk_id: str
    zone_id: str
    occupant_id: str
    start: datetime
    end: datetime


@dataclass(frozen=True)
class SimFeedback:
    feedback_id: str
    occupant_id: str
    reservation_id: str
    desk_id: str
    zone_id: str
    timestamp: datetime
    votes: dict  # Dimension -> Preference


@dataclass(frozen=True)
class Scenario:
    spec: ScenarioSpec
    zones: tuple[Zone, ...]
    desks: tuple[Desk, ...]
    readings: tuple[SensorReading, ...]
    reservations: tuple[SimReservation, ...]
    feedback: tuple[SimFeedback, ...]
    ground_truth: GroundTruth


def _token(rng: np.random.Generator) -> str:
    return "".join(_TOKEN_ALPHABET[i] for i in rng.integers(0, len(_TOKEN_ALPHABET), size=12))


def _clip(channel: str, value: float) -> float:
    lo, hi = PLAUSIBILITY_BOUNDS[channel]
    return float(min(max(value, lo), hi))


def _vote_at(
    condition: float, band: Optional[tuple[float, float]], noise: float, rng: np.random.Generator
) -> Preference:
    if band is None:
        return list(Preference)[int(rng.integers(3))]
    if noise > 0 and rng.random() < noise:
        return list(Preference)[int(rng.integers(3))]
    lo, hi = band
    if condition < lo:
        return Preference.INCREASE
    if condition > hi:
        return Preference.DECREASE
    return Preference.COMFORTABLE


def generate(spec: ScenarioSpec) -> Scenario:
    spec.validate()
    rng = np.random.default_rng(spec.seed)
    tz = ZoneInfo(spec.timezone)
    start_date = spec.start or (datetime.now(tz).date() - timedelta(days=spec.days))

    zones = []
    desks = []
    for zi, _ in enumerate(spec.zones, start=1):
        zone_id = f"zone-{zi}"
        desk_ids = tuple(f"{zone_id}-desk-{di}" for di in range(1, spec.desks_per_zone + 1))
        zones.append(
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
            desks.append(
                Desk(
                    desk_id=desk_id,
                    zone_id=zone_id,
                    label=f"Flex Zone {zi}/{di}",
                    qr_token=_token(rng),
                )
            )

    # one reading per zone per 5 minutes over the whole horizon
    horizon_start = datetime.combine(start_date, time(0, 0), tzinfo=tz).astimezone(UTC)
    steps = spec.days * 24 * 60 // READING_CADENCE_MIN
    grid = [horizon_start + timedelta(minutes=READING_CADENCE_MIN * i) for i in range(steps)]
    readings = []
    series: dict = {}  # (zone_id, dimension) -> np.ndarray aligned with grid
    for zone, climate in zip(zones, spec.zones):
        values = {}
        for dim in Dimension:
            mean, std = climate.params(dim)
            channel = _CHANNEL_FOR_DIM[dim]
            raw = rng.normal(mean, std, size=steps)
            lo, hi = PLAUSIBILITY_BOUNDS[channel]
            values[dim] = np.clip(raw, lo, hi)
            series[(zone.zone_id, dim)] = values[dim]
        background = {
            name: np.clip(rng.normal(mu, sd, size=steps), *PLAUSIBILITY_BOUNDS[name])
            for name, (mu, sd) in _BACKGROUND.items()
        }
        for i, ts in enumerate(grid):
            local_hour = ts.astimezone(tz).hour
            readings.append(
                SensorReading(
                    zone_id=zone.zone_id,
                    timestamp=floor_second(ts),
                    temp_c=float(values[Dimension.THERMAL][i]),
                    rh_pct=float(background["rh_pct"][i]),
                    noise_db=float(values[Dimension.AURAL][i]),
                    lux=float(values[Dimension.VISUAL][i]),
                    co2_ppm=float(background["co2_ppm"][i]),
                    tvoc_ppb=float(background["tvoc_ppb"][i]),
                    presence=8 <= local_hour < 18,
                )
            )

    def grid_index(ts: datetime) -> int:
        return int((ts - horizon_start).total_seconds() // (READING_CADENCE_MIN * 60))

    occupant_ids = [f"occ-{i:03d}" for i in range(1, len(spec.occupants) + 1)]
    type_by_occupant = {}
    hard = set()
    for occupant_id, latent in zip(occupant_ids, spec.occupants):
        type_by_occupant[occupant_id] = latent.name
        if latent.random_voter:
            hard.add(occupant_id)

    # sessions: conflict-free per desk and per occupant, two-hour slots, 8-16h starts
    desk_busy: dict = {d.desk_id: [] for d in desks}
    reservations = []
    feedback = []
    res_seq = 0
    fb_seq = 0
    session_len = timedelta(hours=2)
    for occupant_id, latent in zip(occupant_ids, spec.occupants):
        occupant_busy: list = []
        placed = 0
        attempts = 0
        # occupants alternate zones: shuffled round-robin keeps every
        # occupant's zone exposure even across the horizon
        zone_cycle: list = []
        while len(zone_cycle) < spec.sessions_per_occupant:
            order = list(range(len(zones)))
            rng.shuffle(order)
            zone_cycle.extend(order)
        while placed < spec.sessions_per_occupant:
            attempts += 1
            if attempts > spec.sessions_per_occupant * 400:
                raise InvalidSpec("cannot place sessions: scenario too crowded")
            day = int(rng.integers(spec.days))
            zone = zones[zone_cycle[placed]]
            desk_id = zone.desk_ids[int(rng.integers(len(zone.desk_ids)))]
            hour = 8 + int(rng.integers(9))  # start 08..16, session ends by 18:00
            start_local = datetime.combine(start_date + timedelta(days=day), time(hour, 0), tzinfo=tz)
            start = start_local.astimezone(UTC)
            end = start + session_len
            if any(s < end and start < e for s, e in desk_busy[desk_id]):
                continue
            if any(s < end and start < e for s, e in occupant_busy):
                continue
            desk_busy[desk_id].append((start, end))
            occupant_busy.append((start, end))
            res_seq += 1
            reservation = SimReservation(
                reservation_id=f"res-{res_seq:05d}",
                desk_id=desk_id,
                zone_id=zone.zone_id,
                occupant_id=occupant_id,
                start=start,
                end=end,
            )
            reservations.append(reservation)
            placed += 1
            for v in range(spec.votes_per_session):
                vote_ts = start + timedelta(minutes=30 * v)
                idx = grid_index(vote_ts)
                votes = {}
                for dim in Dimension:
                    condition = float(series[(zone.zone_id, dim)][idx])
                    votes[dim] = _vote_at(condition, latent.band(dim), spec.vote_noise, rng)
                fb_seq += 1
                feedback.append(
                    SimFeedback(
                        feedback_id=f"fb-{fb_seq:05d}",
                        occupant_id=occupant_id,
                        reservation_id=reservation.reservation_id,
                        desk_id=desk_id,
                        zone_id=zone.zone_id,
                        timestamp=floor_second(vote_ts),
                        votes=votes,
                    )
                )

    reservations.sort(key=lambda r: (r.start, r.reservation_id))
    feedback.sort(key=lambda f: (f.timestamp, f.feedback_id))
    return Scenario(
        spec=spec,
        zones=tuple(zones),
        desks=tuple(desks),
        readings=tuple(readings),
        reservations=tuple(reservations),
        feedback=tuple(feedback),
        ground_truth=GroundTruth(
            type_by_occupant=type_by_occupant, hard_to_predict=frozenset(hard)
        ),
    )


@dataclass(frozen=True)
class RecoveryReport:
    ari: float
    confusion: dict  # (type name, cluster index) -> count
    n_scored: int


def evaluate_recovery(model: ComfortClusterModel, truth: GroundTruth) -> RecoveryReport:
    """Agreement between recovered clusters and planted types.

    Planted hard-to-predict occupants are excluded: random voters have no
    recoverable type, so they neither reward nor punish the model.
    """
    scored = [
        occ
        for occ in sorted(truth.type_by_occupant)
        if occ in model.assignments and occ not in truth.hard_to_predict
    ]
    truth_labels = [truth.type_by_occupant[occ] for occ in scored]
    model_labels = [model.assignments[occ] for occ in scored]
    confusion: dict = {}
    for t, c in zip(truth_labels, model_labels):
        confusion[(t, c)] = confusion.get((t, c), 0) + 1
    return RecoveryReport(
        ari=adjusted_rand_index(truth_labels, model_labels),
        confusion=confusion,
        n_scored=len(scored),
    )


def type_separation(
    features, truth: GroundTruth
) -> float:
    """Planted-type separation in feature space, in units of within-type spread.

    Ratio of the minimum inter-type centroid distance to the maximum pooled
    within-type standard deviation, over structured (non-random-voter) types.
    """
    groups: dict = {}
    for f in features:
        if f.occupant_id in truth.hard_to_predict:
            continue
        groups.setdefault(truth.type_by_occupant[f.occupant_id], []).append(f.vector())
    if len(groups) < 2:
        raise InvalidSpec("separation needs at least two structured types")
    centroids = {name: np.mean(vs, axis=0) for name, vs in groups.items()}
    within = max(
        float(np.sqrt(np.mean(np.sum((np.array(vs) - centroids[name]) ** 2, axis=1))))
        for name, vs in groups.items()
    )
    names = sorted(centroids)
    inter = min(
        float(np.linalg.norm(centroids[a] - centroids[b]))
        for i, a in enumerate(names)
        for b in names[i + 1:]
    )
    return inter / within if within > 0 else float("inf")


# six zones spanning cool/dim/quiet to warm/bright/loud, two buildings, three floors
DEMO_CLIMATES = (
    ZoneClimate(21.5, 0.6, 200.0, 60.0, 38.0, 2.5),
    ZoneClimate(22.5, 0.6, 350.0, 60.0, 44.0, 2.5),
    ZoneClimate(23.5, 0.6, 500.0, 60.0, 50.0, 2.5),
    ZoneClimate(24.5, 0.6, 650.0, 60.0, 56.0, 2.5),
    ZoneClimate(25.5, 0.6, 800.0, 60.0, 62.0, 2.5),
    ZoneClimate(26.5, 0.6, 950.0, 60.0, 68.0, 2.5),
)

DEMO_TYPES = {
    "cool-lover": LatentType(
        "cool-lover",
        {
            Dimension.THERMAL: (15.0, 22.9),
            Dimension.VISUAL: (50.0, 420.0),
            Dimension.AURAL: (25.0, 47.0),
        },
    ),
    "warm-lover": LatentType(
        "warm-lover",
        {
            Dimension.THERMAL: (25.1, 33.0),
            Dimension.VISUAL: (580.0, 1600.0),
            Dimension.AURAL: (59.0, 90.0),
        },
    ),
    "easygoing": LatentType(
        "easygoing",
        {
            Dimension.THERMAL: (15.0, 33.0),
            Dimension.VISUAL: (50.0, 1600.0),
            Dimension.AURAL: (25.0, 90.0),
        },
    ),
    "wildcard": LatentType("wildcard", random_voter=True),
}


def desk_scale_spec(seed: int = 7, vote_noise: float = 0.05, start: Optional[date] = None) -> ScenarioSpec:
    """Study-scale scenario: 25 occupants over 36 desks in 6 zones, ~1200 votes."""
    occupants = (
        [DEMO_TYPES["cool-lover"]] * 8
        + [DEMO_TYPES["warm-lover"]] * 8
        + [DEMO_TYPES["easygoing"]] * 6
        + [DEMO_TYPES["wildcard"]] * 3
    )
    return ScenarioSpec(
        seed=seed,
        zones=DEMO_CLIMATES,
        occupants=tuple(occupants),
        sessions_per_occupant=12,
        votes_per_session=4,
        vote_noise=vote_noise,
        days=30,
        desks_per_zone=6,
        start=start,
    )


# -- JSON scenario specs -------------------------------------------------------

def spec_from_dict(raw: dict) -> ScenarioSpec:
    zones = tuple(
        ZoneClimate(
            temp_mean=float(z["temp_mean"]),
            temp_std=float(z["temp_std"]),
            lux_mean=float(z["lux_mean"]),
            lux_std=float(z["lux_std"]),
            noise_mean=float(z["noise_mean"]),
            noise_std=float(z["noise_std"]),
        )
        for z in raw["zones"]
    )
    occupants = []
    for o in raw["occupants"]:
        if o.get("random_voter"):
            occupants.append(LatentType(name=o["name"], random_voter=True))
        else:
            occupants.append(
                LatentType(
                    name=o["name"],
                    bands={
                        Dimension(d): (float(lo), float(hi)) for d, (lo, hi) in o["bands"].items()
                    },
                )
            )
    start = raw.get("start")
    return ScenarioSpec(
        seed=int(raw["seed"]),
        zones=zones,
        occupants=tuple(occupants),
        sessions_per_occupant=int(raw["sessions_per_occupant"]),
        votes_per_session=int(raw["votes_per_session"]),
        vote_noise=float(raw["vote_noise"]),
        days=int(raw.get("days", 30)),
        desks_per_zone=int(raw.get("desks_per_zone", 6)),
        start=date.fromisoformat(start) if start else None,
        timezone=raw.get("timezone", "Asia/Singapore"),
    ).validate()


def spec_to_dict(spec: ScenarioSpec) -> dict:
    return {
        "seed": spec.seed,
        "zones": [
            {
                "temp_mean": z.temp_mean,
                "temp_std": z.temp_std,
                "lux_mean": z.lux_mean,
                "lux_std": z.lux_std,
                "noise_mean": z.noise_mean,
                "noise_std": z.noise_std,
            }
            for z in spec.zones
        ],
        "occupants": [
            {"name": o.name, "random_voter": True}
            if o.random_voter
            else {
                "name": o.name,
                "bands": {d.value: list(b) for d, b in sorted(o.bands.items())},
            }
            for o in spec.occupants
        ],
        "sessions_per_occupant": spec.sessions_per_occupant,
        "votes_per_session": spec.votes_per_session,
        "vote_noise": spec.vote_noise,
        "days": spec.days,
        "desks_per_zone": spec.desks_per_zone,
        "start": None if spec.start is None else spec.start.isoformat(),
        "timezone": spec.timezone,
    }


def load_spec(path: str) -> ScenarioSpec:
    with open(path) as fp:
        return spec_from_dict(json.load(fp))
