"""Desk reservation lifecycle.

Sessions are two hours and extend in two-hour multiples. A reservation is
either created for later (Reserved, claimed by QR check-in within a grace
window) or started on the spot (use-now, immediately InUse). Mutations are
serialized per desk so overlapping non-terminal reservations can never be
created, no matter how requests interleave.
"""

from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass
from datetime import datetime, timedelta
from enum import Enum
from typing import Callable, Optional

from .catalog import Catalog
from .config import Config
from .errors import (
    BadState,
    DeskConflict,
    InvalidWindow,
    OccupantBusy,
    OutsideGrace,
    OutsideOperatingHours,
    PastStart,
    UnknownDesk,
    UnknownReservation,
    WrongDesk,
)
from .timeutil import ensure_utc, floor_second, iso, minutes, parse_instant, utc_now


class ReservationState(str, Enum):
    RESERVED = "reserved"
    IN_USE = "in_use"
    COMPLETED = "completed"
    EXPIRED = "expired"
    CANCELLED = "cancelled"


NON_TERMINAL = frozenset({ReservationState.RESERVED, ReservationState.IN_USE})

# legal transitions; terminal states are absent on purpose
_TRANSITIONS = {
    ReservationState.RESERVED: {
        ReservationState.IN_USE,
        ReservationState.EXPIRED,
        ReservationState.CANCELLED,
    },
    ReservationState.IN_USE: {ReservationState.COMPLETED},
}


@dataclass
class Reservation:
    reservation_id: str
    desk_id: str
    zone_id: str
    occupant_id: str
    start: datetime
    end: datetime
    state: ReservationState
    check_in_time: Optional[datetime] = None

    def overlaps(self, t0: datetime, t1: datetime) -> bool:
        return self.start < t1 and t0 < self.end

    def to_dict(self) -> dict:
        return {
            "reservation_id": self.reservation_id,
            "desk_id": self.desk_id,
            "zone_id": self.zone_id,
            "occupant_id": self.occupant_id,
            "start": iso(self.start),
            "end": iso(self.end),
            "state": self.state.value,
            "check_in_time": None if self.check_in_time is None else iso(self.check_in_time),
        }


@dataclass(frozen=True)
class PromptSchedule:
    reservation_id: str
    prompt_times: tuple[datetime, ...]


def _new_id() -> str:
    return "res-" + uuid.uuid4().hex[:12]


class BookingService:
    def __init__(self, catalog: Catalog, config: Config, clock: Optional[Callable[[], datetime]] = None):
        self._catalog = catalog
        self._config = config
        self._clock = clock or utc_now
        self._store_lock = threading.RLock()
        self._reservations: dict[str, Reservation] = {}
        self._by_desk: dict[str, list[str]] = {}
        self._desk_locks: dict[str, threading.Lock] = {}
        self._occupant_locks: dict[str, threading.Lock] = {}

    # -- locking ------------------------------------------------------------

    def _desk_lock(self, desk_id: str) -> threading.Lock:
        with self._store_lock:
            return self._desk_locks.setdefault(desk_id, threading.Lock())

    def _occupant_lock(self, occupant_id: str) -> threading.Lock:
        with self._store_lock:
            return self._occupant_locks.setdefault(occupant_id, threading.Lock())

    # -- internal helpers ------------------------------------------------------

    def _session_length(self) -> timedelta:
        return minutes(self._config.session_minutes)

    def _desk_conflicts(self, desk_id: str, t0: datetime, t1: datetime,
                        ignore: Optional[str] = None) -> bool:
        with self._store_lock:
            ids = list(self._by_desk.get(desk_id, []))
        for rid in ids:
            r = self._reservations[rid]
            if rid != ignore and r.state in NON_TERMINAL and r.overlaps(t0, t1):
                return True
        return False

    def _occupant_is_busy(self, occupant_id: str) -> bool:
        # one non-terminal reservation per occupant at a time
        with self._store_lock:
            return any(
                r.occupant_id == occupant_id and r.state in NON_TERMINAL
                for r in self._reservations.values()
            )

    def _check_operating_hours(self, start: datetime) -> None:
        lo, hi = self._config.operating_hours
        local = start.astimezone(self._config.tzinfo)
        tod = local.hour * 60 + local.minute
        if not (lo * 60 <= tod < hi * 60):
            raise OutsideOperatingHours(
                f"session starts are limited to {lo:02d}:00-{hi:02d}:00 {self._config.timezone}"
            )

    def _require_active_desk(self, desk_id: str):
        desk = self._catalog.get_desk(desk_id)  # raises UnknownDesk
        if not desk.active:
            raise UnknownDesk(f"desk {desk_id} is deactivated")
        return desk

    def _insert(self, reservation: Reservation) -> Reservation:
        with self._store_lock:
            self._reservations[reservation.reservation_id] = reservation
            self._by_desk.setdefault(reservation.desk_id, []).append(reservation.reservation_id)
        return reservation

    def _transition(self, reservation: Reservation, to: ReservationState) -> None:
        allowed = _TRANSITIONS.get(reservation.state, set())
        if to not in allowed:
            raise BadState(f"{reservation.state.value} -> {to.value} is not a legal transition")
        reservation.state = to

    # -- operations -------------------------------------------------------------

    def reserve(
        self,
        desk_id: str,
        occupant_id: str,
        start: datetime,
        now: Optional[datetime] = None,
        reservation_id: Optional[str] = None,
    ) -> Reservation:
        start = floor_second(ensure_utc(start))
        now = floor_second(ensure_utc(now)) if now else self._clock()
        desk = self._require_active_desk(desk_id)
        if start < now:
            raise PastStart(f"start {iso(start)} is before now {iso(now)}")
        self._check_operating_hours(start)
        end = start + self._session_length()
        with self._desk_lock(desk_id), self._occupant_lock(occupant_id):
            if self._desk_conflicts(desk_id, start, end):
                raise DeskConflict(f"desk {desk_id} already booked in [{iso(start)}, {iso(end)})")
            if self._occupant_is_busy(occupant_id):
                raise OccupantBusy(f"occupant already holds an active reservation")
            return self._insert(
                Reservation(
                    reservation_id=reservation_id or _new_id(),
                    desk_id=desk_id,
                    zone_id=desk.zone_id,
                    occupant_id=occupant_id,
                    start=start,
                    end=end,
                    state=ReservationState.RESERVED,
                )
            )

    def use_now(
        self,
        qr_token: str,
        occupant_id: str,
        now: Optional[datetime] = None,
        reservation_id: Optional[str] = None,
    ) -> Reservation:
        desk = self._catalog.resolve_qr(qr_token)  # raises UnknownToken
        return self.start_session(desk.desk_id, occupant_id, now=now, reservation_id=reservation_id)

    def start_session(
        self,
        desk_id: str,
        occupant_id: str,
        now: Optional[datetime] = None,
        reservation_id: Optional[str] = None,
    ) -> Reservation:
        """use-now by desk id: session starts immediately, already checked in."""
        now = floor_second(ensure_utc(now)) if now else self._clock()
        desk = self._require_active_desk(desk_id)
        self._check_operating_hours(now)
        end = now + self._session_length()
        with self._desk_lock(desk_id), self._occupant_lock(occupant_id):
            # must not eat a future booking: the whole slot has to be clear
            if self._desk_conflicts(desk_id, now, end):
                raise DeskConflict(f"desk {desk_id} is not free for [{iso(now)}, {iso(end)})")
            if self._occupant_is_busy(occupant_id):
                raise OccupantBusy("occupant already holds an active reservation")
            return self._insert(
                Reservation(
                    reservation_id=reservation_id or _new_id(),
                    desk_id=desk_id,
                    zone_id=desk.zone_id,
                    occupant_id=occupant_id,
                    start=now,
                    end=end,
                    state=ReservationState.IN_USE,
                    check_in_time=now,
                )
            )

    def check_in(self, reservation_id: str, qr_token: str, now: datetime) -> Reservation:
        reservation = self.get(reservation_id)
        desk = self._catalog.resolve_qr(qr_token)
        if desk.desk_id != reservation.desk_id:
            raise WrongDesk(f"scanned desk {desk.desk_id}, reserved desk {reservation.desk_id}")
        return self.check_in_by_desk(reservation_id, now)

    def check_in_by_desk(self, reservation_id: str, now: datetime) -> Reservation:
        """Check-in after the desk identity has been verified (or replayed)."""
        now = floor_second(ensure_utc(now))
        reservation = self.get(reservation_id)
        with self._desk_lock(reservation.desk_id):
            if reservation.state is not ReservationState.RESERVED:
                raise BadState(f"cannot check in from state {reservation.state.value}")
            grace = minutes(self._config.grace_min)
            if abs((now - reservation.start).total_seconds()) > grace.total_seconds():
                raise OutsideGrace(
                    f"check-in at {iso(now)} outside +/-{self._config.grace_min} min of start"
                )
            self._transition(reservation, ReservationState.IN_USE)
            reservation.check_in_time = now
            return reservation

    def extend(self, reservation_id: str) -> Reservation:
        reservation = self.get(reservation_id)
        with self._desk_lock(reservation.desk_id):
            if reservation.state is not ReservationState.IN_USE:
                raise BadState(f"cannot extend from state {reservation.state.value}")
            new_end = reservation.end + self._session_length()
            if self._desk_conflicts(
                reservation.desk_id, reservation.end, new_end, ignore=reservation_id
            ):
                raise DeskConflict("next slot is already reserved")
            reservation.end = new_end
            return reservation

    def cancel(self, reservation_id: str) -> Reservation:
        reservation = self.get(reservation_id)
        with self._desk_lock(reservation.desk_id):
            if reservation.state is not ReservationState.RESERVED:
                raise BadState("only Reserved reservations can be cancelled")
            self._transition(reservation, ReservationState.CANCELLED)
            return reservation

    def expire_stale(self, now: datetime) -> list[str]:
        """No-shows past grace become Expired; sessions past end become Completed.

        Returns the ids of every reservation transitioned by this sweep.
        """
        now = floor_second(ensure_utc(now))
        grace = minutes(self._config.grace_min)
        with self._store_lock:
            candidates = [r.reservation_id for r in self._reservations.values()
                          if r.state in NON_TERMINAL]
        touched = []
        for rid in sorted(candidates):
            r = self._reservations[rid]
            with self._desk_lock(r.desk_id):
                if r.state is ReservationState.RESERVED and now > r.start + grace:
                    self._transition(r, ReservationState.EXPIRED)
                    touched.append(rid)
                elif r.state is ReservationState.IN_USE and now > r.end:
                    self._transition(r, ReservationState.COMPLETED)
                    touched.append(rid)
        return touched

    def prompt_schedule(self, reservation_id: str) -> PromptSchedule:
        """Feedback nudges at session start, session end, and every half hour between."""
        reservation = self.get(reservation_id)
        if reservation.state not in NON_TERMINAL:
            raise BadState(f"no prompts for state {reservation.state.value}")
        spacing = minutes(self._config.prompt_spacing_min)
        times = []
        t = reservation.start
        while t <= reservation.end:
            times.append(t)
            t = t + spacing
        return PromptSchedule(reservation_id=reservation_id, prompt_times=tuple(times))

    def list_available(self, zone_id: str, interval: tuple[datetime, datetime]) -> list[str]:
        t0, t1 = ensure_utc(interval[0]), ensure_utc(interval[1])
        if t0 >= t1:
            raise InvalidWindow(f"empty interval [{t0}, {t1})")
        zone = self._catalog.get_zone(zone_id)  # raises UnknownZone
        out = []
        for desk in self._catalog.desks(zone_id=zone.zone_id, active_only=True):
            if not self._desk_conflicts(desk.desk_id, t0, t1):
                out.append(desk.desk_id)
        return out

    # -- reads --------------------------------------------------------------

    def get(self, reservation_id: str) -> Reservation:
        with self._store_lock:
            r = self._reservations.get(reservation_id)
            if r is None:
                raise UnknownReservation(reservation_id)
            return r

    def reservations_for(self, occupant_id: str) -> list[Reservation]:
        with self._store_lock:
            out = [r for r in self._reservations.values() if r.occupant_id == occupant_id]
        return sorted(out, key=lambda r: (r.start, r.reservation_id))

    def all_reservations(self) -> list[Reservation]:
        with self._store_lock:
            return sorted(self._reservations.values(), key=lambda r: r.reservation_id)


def reservation_from_dict(raw: dict) -> Reservation:
    return Reservation(
        reservation_id=raw["reservation_id"],
        desk_id=raw["desk_id"],
        zone_id=raw["zone_id"],
        occupant_id=raw["occupant_id"],
        start=parse_instant(raw["start"]),
        end=parse_instant(raw["end"]),
        state=ReservationState(raw["state"]),
        check_in_time=None if raw.get("check_in_time") is None else parse_instant(raw["check_in_time"]),
    )
