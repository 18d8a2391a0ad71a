"""Three-point comfort votes tied to desk sessions, joined to sensor readings.

A vote says, per dimension, whether the occupant wants less of it, is
comfortable, or wants more (thermal: cooler/comfortable/warmer, visual:
dimmer/-/brighter, aural: quieter/-/louder). Enrichment attaches the nearest
sensor reading from the session's zone; it is computed on demand, so it stays
deterministic no matter when or in what order readings arrived.
"""

from __future__ import annotations

import csv
import threading
import uuid
from dataclasses import dataclass
from datetime import datetime
from enum import Enum
from typing import IO, Callable, Optional, Sequence

from .booking import BookingService, ReservationState
from .errors import BadState, DuplicateDimension, EmptyVotes, UnknownOccupant
from .telemetry import SensorReading, TelemetryStore
from .timeutil import ensure_utc, floor_second, iso, parse_instant


class Dimension(str, Enum):
    THERMAL = "thermal"
    VISUAL = "visual"
    AURAL = "aural"


class Preference(str, Enum):
    DECREASE = "decrease"
    COMFORTABLE = "comfortable"
    INCREASE = "increase"


# sensor channel observed by each comfort dimension
DIMENSION_CHANNEL = {
    Dimension.THERMAL: "temp_c",
    Dimension.VISUAL: "lux",
    Dimension.AURAL: "noise_db",
}


@dataclass(frozen=True)
class ComfortVote:
    dimension: Dimension
    value: Preference


@dataclass(frozen=True)
class FeedbackPoint:
    feedback_id: str
    occupant_id: str
    reservation_id: str
    desk_id: str
    zone_id: str
    timestamp: datetime
    votes: tuple[ComfortVote, ...]

    def vote_for(self, dimension: Dimension) -> Optional[Preference]:
        for vote in self.votes:
            if vote.dimension is dimension:
                return vote.value
        return None

    def to_dict(self) -> dict:
        return {
            "feedback_id": self.feedback_id,
            "occupant_id": self.occupant_id,
            "reservation_id": self.reservation_id,
            "desk_id": self.desk_id,
            "zone_id": self.zone_id,
            "timestamp": iso(self.timestamp),
            "votes": {v.dimension.value: v.value.value for v in self.votes},
        }


@dataclass(frozen=True)
class EnrichedFeedback:
    base: FeedbackPoint
    sensor_snapshot: Optional[SensorReading]
    enrichment_delta_s: Optional[float]  # snapshot.timestamp - vote timestamp

    def snapshot_value(self, dimension: Dimension) -> Optional[float]:
        if self.sensor_snapshot is None:
            return None
        return self.sensor_snapshot.channel(DIMENSION_CHANNEL[dimension])


def votes_from_dict(raw: dict) -> tuple[ComfortVote, ...]:
    return tuple(
        ComfortVote(dimension=Dimension(d), value=Preference(v)) for d, v in sorted(raw.items())
    )


def feedback_from_dict(raw: dict) -> FeedbackPoint:
    return FeedbackPoint(
        feedback_id=raw["feedback_id"],
        occupant_id=raw["occupant_id"],
        reservation_id=raw["reservation_id"],
        desk_id=raw["desk_id"],
        zone_id=raw["zone_id"],
        timestamp=parse_instant(raw["timestamp"]),
        votes=votes_from_dict(raw["votes"]),
    )


EXPORT_COLUMNS = (
    "feedback_id",
    "occupant_id",
    "zone_id",
    "desk_id",
    "timestamp",
    "thermal",
    "visual",
    "aural",
    "temp_c",
    "lux",
    "noise_db",
    "enrichment_delta_s",
)


class FeedbackService:
    """Append-only vote store; nothing here ever mutates or deletes a point."""

    def __init__(
        self,
        booking: BookingService,
        telemetry: TelemetryStore,
        occupant_exists: Callable[[str], bool],
        join_tolerance_s: float = 300.0,
    ):
        self._booking = booking
        self._telemetry = telemetry
        self._occupant_exists = occupant_exists
        self._join_tolerance_s = join_tolerance_s
        self._lock = threading.Lock()
        self._points: list[FeedbackPoint] = []
        self._by_occupant: dict[str, list[int]] = {}

    def submit(
        self,
        reservation_id: str,
        votes: Sequence[ComfortVote],
        now: datetime,
        feedback_id: Optional[str] = None,
    ) -> FeedbackPoint:
        now = floor_second(ensure_utc(now))
        reservation = self._booking.get(reservation_id)
        if reservation.state is not ReservationState.IN_USE:
            raise BadState(f"feedback requires an in-use session, not {reservation.state.value}")
        if not (reservation.start <= now <= reservation.end):
            raise BadState(f"vote at {iso(now)} falls outside the session")
        if not votes:
            raise EmptyVotes("a submission needs at least one vote")
        seen = set()
        for vote in votes:
            if vote.dimension in seen:
                raise DuplicateDimension(f"two votes for {vote.dimension.value} in one submission")
            seen.add(vote.dimension)
        point = FeedbackPoint(
            feedback_id=feedback_id or "fb-" + uuid.uuid4().hex[:12],
            occupant_id=reservation.occupant_id,
            reservation_id=reservation_id,
            desk_id=reservation.desk_id,
            zone_id=reservation.zone_id,
            timestamp=now,
            votes=tuple(votes),
        )
        with self._lock:
            self._by_occupant.setdefault(point.occupant_id, []).append(len(self._points))
            self._points.append(point)
        return point

    def enrich(self, point: FeedbackPoint) -> EnrichedFeedback:
        """Attach the nearest-in-time reading from the vote's zone, if close enough.

        Absence is a value: with no reading inside the join tolerance the
        snapshot is None and the point is later excluded from profiling.
        """
        snapshot = self._telemetry.nearest_reading(
            point.zone_id, point.timestamp, self._join_tolerance_s
        )
        delta = None
        if snapshot is not None:
            delta = (snapshot.timestamp - point.timestamp).total_seconds()
        return EnrichedFeedback(base=point, sensor_snapshot=snapshot, enrichment_delta_s=delta)

    def user_history(self, occupant_id: str) -> list[EnrichedFeedback]:
        if not self._occupant_exists(occupant_id):
            raise UnknownOccupant(occupant_id)
        with self._lock:
            indices = list(self._by_occupant.get(occupant_id, []))
            points = [self._points[i] for i in indices]
        points.sort(key=lambda p: (p.timestamp, p.feedback_id))
        return [self.enrich(p) for p in points]

    def all_points(self) -> list[FeedbackPoint]:
        with self._lock:
            return list(self._points)

    def enriched_by_occupant(self) -> dict[str, list[EnrichedFeedback]]:
        """Every occupant's enriched history, ordered by timestamp within occupant."""
        out: dict[str, list[EnrichedFeedback]] = {}
        with self._lock:
            snapshot = list(self._points)
        for point in snapshot:
            out.setdefault(point.occupant_id, []).append(self.enrich(point))
        for history in out.values():
            history.sort(key=lambda e: (e.base.timestamp, e.base.feedback_id))
        return out

    def export_csv(self, fp: IO[str]) -> int:
        """Flat export for offline analysis; one row per feedback point."""
        writer = csv.writer(fp)
        writer.writerow(EXPORT_COLUMNS)
        count = 0
        for point in self.all_points():
            enriched = self.enrich(point)
            snap = enriched.sensor_snapshot
            writer.writerow(
                [
                    point.feedback_id,
                    point.occupant_id,
                    point.zone_id,
                    point.desk_id,
                    iso(point.timestamp),
                    _vote_str(point, Dimension.THERMAL),
                    _vote_str(point, Dimension.VISUAL),
                    _vote_str(point, Dimension.AURAL),
                    "" if snap is None or snap.temp_c is None else snap.temp_c,
                    "" if snap is None or snap.lux is None else snap.lux,
                    "" if snap is None or snap.noise_db is None else snap.noise_db,
                    "" if enriched.enrichment_delta_s is None else enriched.enrichment_delta_s,
                ]
            )
            count += 1
        return count


def _vote_str(point: FeedbackPoint, dimension: Dimension) -> str:
    value = point.vote_for(dimension)
    return "" if value is None else value.value
