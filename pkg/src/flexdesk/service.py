"""Service core: modules wired together behind an event-sourced command layer.

Every state change flows through a command that first applies the mutation
(which may reject it) and then appends one event carrying all resolved ids
and instants. Replaying the log therefore rebuilds the exact same state; no
command consults a wall clock during replay.
"""

from __future__ import annotations

import logging
from datetime import datetime, timedelta
from pathlib import Path
from typing import Callable, Optional, Sequence

from .booking import BookingService, Reservation
from .catalog import (
    Catalog,
    Desk,
    Zone,
    desk_from_dict,
    desk_to_dict,
    zone_from_dict,
    zone_to_dict,
)
from .config import Config
from .errors import TooFewUsers
from .events import EventLog, EventRecord, canonical_json
from .feedback import ComfortVote, FeedbackService, Dimension, votes_from_dict
from .identity import IdentityRegistry, OccupantIdentity
from .matching import MatchMatrix, compute_matrix, matrix_from_dict
from .profiling import ModelRegistry, OccupantProfile, fit_dimension, model_from_dict, profile_occupant
from .simgen import Scenario
from .telemetry import IngestResult, SensorReading, TelemetryStore, reading_from_dict, reading_to_dict
from .timeutil import ensure_utc, iso, parse_instant, utc_now

log = logging.getLogger(__name__)

EVENTS_FILE = "events.log"


class ServiceCore:
    def __init__(
        self,
        config: Config,
        data_dir: Optional[Path] = None,
        clock: Optional[Callable[[], datetime]] = None,
    ):
        self.config = config
        self.clock = clock or utc_now
        self.catalog = Catalog()
        self.telemetry = TelemetryStore(self.catalog, config.tzinfo)
        self.booking = BookingService(self.catalog, config, clock=self.clock)
        self.identities = IdentityRegistry()
        self.feedback = FeedbackService(
            self.booking,
            self.telemetry,
            occupant_exists=self.identities.exists,
            join_tolerance_s=config.join_tolerance_s,
        )
        self.models = ModelRegistry()
        self.matrix: Optional[MatchMatrix] = None

        self._log: Optional[EventLog] = None
        if data_dir is not None:
            data_dir = Path(data_dir)
            self._log = EventLog(data_dir / EVENTS_FILE)
            self._replay()

    # -- event plumbing -------------------------------------------------------

    def _record(self, kind: str, payload: dict, timestamp: Optional[datetime] = None) -> None:
        if self._log is not None:
            self._log.append(kind, payload, timestamp)

    def _replay(self) -> None:
        assert self._log is not None
        count = 0
        for record in self._log.read_all():
            self._apply(record)
            count += 1
        if count:
            log.info("replayed %d events from %s", count, self._log.path)

    def _apply(self, record: EventRecord) -> None:
        kind, p = record.kind, record.payload
        if kind == "zone_registered":
            self.catalog.register_zone(zone_from_dict(p["zone"]))
        elif kind == "desk_registered":
            self.catalog.register_desk(desk_from_dict(p["desk"]))
        elif kind == "desk_deactivated":
            self.catalog.deactivate_desk(p["desk_id"])
        elif kind == "occupant_onboarded":
            self.identities.onboard(
                display_alias=p.get("display_alias"),
                occupant_id=p["occupant_id"],
                created_at=parse_instant(p["created_at"]),
            )
        elif kind == "reading_ingested":
            self.telemetry.ingest(reading_from_dict(p["reading"]))
        elif kind == "reservation_created":
            self.booking.reserve(
                p["desk_id"],
                p["occupant_id"],
                parse_instant(p["start"]),
                now=parse_instant(p["now"]),
                reservation_id=p["reservation_id"],
            )
        elif kind == "session_started":
            self.booking.start_session(
                p["desk_id"],
                p["occupant_id"],
                now=parse_instant(p["now"]),
                reservation_id=p["reservation_id"],
            )
        elif kind == "checked_in":
            self.booking.check_in_by_desk(p["reservation_id"], parse_instant(p["now"]))
        elif kind == "extended":
            self.booking.extend(p["reservation_id"])
        elif kind == "cancelled":
            self.booking.cancel(p["reservation_id"])
        elif kind == "stale_expired":
            self.booking.expire_stale(parse_instant(p["now"]))
        elif kind == "feedback_submitted":
            self.feedback.submit(
                p["reservation_id"],
                votes_from_dict(p["votes"]),
                now=parse_instant(p["now"]),
                feedback_id=p["feedback_id"],
            )
        elif kind == "model_published":
            self.models.publish(model_from_dict(p["model"]))
        elif kind == "matrix_published":
            self.matrix = matrix_from_dict(p["matrix"])
        else:
            raise ValueError(f"unknown event kind: {kind}")

    # -- commands ---------------------------------------------------------------

    def register_zone(self, zone: Zone) -> str:
        zone_id = self.catalog.register_zone(zone)
        self._record("zone_registered", {"zone": zone_to_dict(self.catalog.get_zone(zone_id))})
        return zone_id

    def register_desk(self, desk: Desk) -> str:
        desk_id = self.catalog.register_desk(desk)
        self._record("desk_registered", {"desk": desk_to_dict(self.catalog.get_desk(desk_id))})
        return desk_id

    def deactivate_desk(self, desk_id: str) -> None:
        self.catalog.deactivate_desk(desk_id)
        self._record("desk_deactivated", {"desk_id": desk_id})

    def load_catalog_seed(self, seed: dict) -> None:
        for raw in seed.get("zones", []):
            self.register_zone(zone_from_dict(raw))
        for raw in seed.get("desks", []):
            self.register_desk(desk_from_dict(raw))
        self.catalog.validate()

    def onboard_occupant(
        self,
        display_alias: Optional[str] = None,
        occupant_id: Optional[str] = None,
        created_at: Optional[datetime] = None,
    ) -> OccupantIdentity:
        identity = self.identities.onboard(
            display_alias=display_alias,
            occupant_id=occupant_id,
            created_at=created_at or self.clock(),
        )
        self._record("occupant_onboarded", identity.to_dict())
        return identity

    def ingest_reading(self, reading: SensorReading) -> IngestResult:
        result = self.telemetry.ingest(reading)
        # quarantined readings are logged too: they replay into quarantine
        self._record("reading_ingested", {"reading": reading_to_dict(reading)})
        return result

    def reserve(self, desk_id: str, occupant_id: str, start: datetime,
                now: Optional[datetime] = None) -> Reservation:
        now = ensure_utc(now) if now else self.clock()
        reservation = self.booking.reserve(desk_id, occupant_id, start, now=now)
        self._record(
            "reservation_created",
            {
                "reservation_id": reservation.reservation_id,
                "desk_id": desk_id,
                "occupant_id": occupant_id,
                "start": iso(reservation.start),
                "now": iso(now),
            },
        )
        return reservation

    def use_now(self, qr_token: str, occupant_id: str, now: Optional[datetime] = None) -> Reservation:
        now = ensure_utc(now) if now else self.clock()
        desk = self.catalog.resolve_qr(qr_token)
        reservation = self.booking.start_session(desk.desk_id, occupant_id, now=now)
        self._record(
            "session_started",
            {
                "reservation_id": reservation.reservation_id,
                "desk_id": desk.desk_id,
                "occupant_id": occupant_id,
                "now": iso(now),
            },
        )
        return reservation

    def check_in(self, reservation_id: str, qr_token: str, now: Optional[datetime] = None) -> Reservation:
        now = ensure_utc(now) if now else self.clock()
        reservation = self.booking.check_in(reservation_id, qr_token, now)
        self._record("checked_in", {"reservation_id": reservation_id, "now": iso(now)})
        return reservation

    def extend(self, reservation_id: str) -> Reservation:
        reservation = self.booking.extend(reservation_id)
        self._record("extended", {"reservation_id": reservation_id})
        return reservation

    def cancel(self, reservation_id: str) -> Reservation:
        reservation = self.booking.cancel(reservation_id)
        self._record("cancelled", {"reservation_id": reservation_id})
        return reservation

    def expire_stale(self, now: Optional[datetime] = None) -> list[str]:
        now = ensure_utc(now) if now else self.clock()
        touched = self.booking.expire_stale(now)
        if touched:
            self._record("stale_expired", {"now": iso(now), "touched": touched})
        return touched

    def submit_feedback(
        self, reservation_id: str, votes: Sequence[ComfortVote], now: Optional[datetime] = None
    ):
        now = ensure_utc(now) if now else self.clock()
        point = self.feedback.submit(reservation_id, votes, now=now)
        self._record(
            "feedback_submitted",
            {
                "feedback_id": point.feedback_id,
                "reservation_id": reservation_id,
                "votes": {v.dimension.value: v.value.value for v in point.votes},
                "now": iso(now),
            },
        )
        return point

    # -- analytics ------------------------------------------------------------

    def recompute_profiles(
        self, dimensions: Optional[Sequence[Dimension]] = None, k_override: Optional[int] = None
    ) -> dict:
        """Refit comfort-type models from all enriched feedback; publish versions."""
        histories = self.feedback.enriched_by_occupant()
        fitted = {}
        for dimension in dimensions or list(Dimension):
            k = k_override if k_override is not None else self.config.k_defaults.get(dimension.value)
            try:
                model, build = fit_dimension(
                    histories,
                    dimension,
                    seed=self.config.seed,
                    restarts=self.config.restarts,
                    min_votes=self.config.min_votes,
                    k=k,
                )
            except TooFewUsers as exc:
                log.warning("skipping %s model: %s", dimension.value, exc)
                continue
            self.models.publish(model)
            self._record("model_published", {"model": model.to_dict()})
            fitted[dimension] = (model, build)
        return fitted

    def recompute_matrix(self, now: Optional[datetime] = None) -> MatchMatrix:
        now = ensure_utc(now) if now else self.clock()
        window = (now - timedelta(days=self.config.matrix_window_days), now)
        weights = {Dimension(d): w for d, w in self.config.weights.items()}
        matrix = compute_matrix(
            self.catalog,
            self.telemetry,
            self.models.latest_all(),
            self.feedback.enriched_by_occupant(),
            window,
            weights,
            hours_filter=self.config.operating_hours,
        )
        self.matrix = matrix
        self._record("matrix_published", {"matrix": matrix.to_dict()})
        return matrix

    def occupant_profile(self, occupant_id: str) -> OccupantProfile:
        history = self.feedback.user_history(occupant_id)
        return profile_occupant(occupant_id, history, self.models)

    def availability_pairs(self, t: datetime) -> list[tuple[str, str]]:
        """(zone_id, desk_id) for every desk free over a session starting at t."""
        interval = (t, t + timedelta(minutes=self.config.session_minutes))
        pairs = []
        for zone in self.catalog.zones():
            for desk_id in self.booking.list_available(zone.zone_id, interval):
                pairs.append((zone.zone_id, desk_id))
        return pairs

    # -- snapshots ---------------------------------------------------------------

    def state_dict(self) -> dict:
        reservations = [r.to_dict() for r in self.booking.all_reservations()]
        points = [p.to_dict() for p in self.feedback.all_points()]
        models = {}
        for dimension in Dimension:
            model = self.models.latest(dimension)
            if model is not None:
                models[dimension.value] = model.to_dict()
        return {
            "catalog": {
                "zones": [zone_to_dict(z) for z in self.catalog.zones()],
                "desks": [desk_to_dict(d) for d in self.catalog.desks()],
            },
            "occupants": [i.to_dict() for i in self.identities.all_identities()],
            "readings": [reading_to_dict(r) for r in self.telemetry.all_readings()],
            "quarantine": [
                {"reading": reading_to_dict(r), "reason": reason}
                for r, reason in self.telemetry.quarantine
            ],
            "reservations": reservations,
            "feedback": points,
            "models": models,
            "matrix": None if self.matrix is None else self.matrix.to_dict(),
        }

    def state_bytes(self) -> bytes:
        return canonical_json(self.state_dict())

    def write_snapshot(self, path: Path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(self.state_bytes())
        return path


def seed_scenario(core: ServiceCore, scenario: Scenario) -> dict:
    """Drive a generated scenario through the real command surface.

    Events are issued in chronological order with the scenario's own clock,
    so the resulting log is exactly what a live deployment would have written.
    """
    for zone in scenario.zones:
        core.register_zone(zone)
    for desk in scenario.desks:
        core.register_desk(desk)
    start_by_res = {r.reservation_id: r.start for r in scenario.reservations}
    horizon = min(r.timestamp for r in scenario.readings)
    for occupant_id in sorted(scenario.ground_truth.type_by_occupant):
        core.onboard_occupant(
            display_alias=occupant_id, occupant_id=occupant_id, created_at=horizon
        )

    # Total chronological order. At one instant: end-of-session votes land
    # before the expiry sweep, which lands before any session starting then
    # (an occupant may sit down again the moment the previous slot ends).
    timeline: list[tuple[datetime, int, str, str, object]] = []
    for reading in scenario.readings:
        timeline.append((reading.timestamp, 0, "reading", reading.zone_id, reading))
    for fb in scenario.feedback:
        prio = 4 if fb.timestamp == start_by_res[fb.reservation_id] else 1
        timeline.append((fb.timestamp, prio, "vote", fb.feedback_id, fb))
    for reservation in scenario.reservations:
        timeline.append((reservation.end, 2, "end", reservation.reservation_id, reservation))
        timeline.append((reservation.start, 3, "start", reservation.reservation_id, reservation))
    timeline.sort(key=lambda item: (item[0], item[1], item[3]))

    desk_tokens = {d.desk_id: d.qr_token for d in scenario.desks}
    session_map: dict = {}
    counts = {"readings": 0, "sessions": 0, "votes": 0}
    for ts, _, kind, _, obj in timeline:
        if kind == "reading":
            core.ingest_reading(obj)
            counts["readings"] += 1
        elif kind == "start":
            live = core.use_now(desk_tokens[obj.desk_id], obj.occupant_id, now=ts)
            session_map[obj.reservation_id] = live.reservation_id
            counts["sessions"] += 1
        elif kind == "vote":
            core.submit_feedback(session_map[obj.reservation_id], _sim_votes(obj), now=ts)
            counts["votes"] += 1
        elif kind == "end":
            core.expire_stale(now=ts + timedelta(seconds=1))
    return counts


def _sim_votes(fb) -> list[ComfortVote]:
    return [ComfortVote(dimension=d, value=v) for d, v in sorted(fb.votes.items())]
