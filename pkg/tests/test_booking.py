from datetime import timedelta

import pytest
from hypothesis import given, settings, strategies as st

from flexdesk.booking import BookingService, NON_TERMINAL, ReservationState
from flexdesk.catalog import Catalog
from flexdesk.config import Config
from flexdesk.errors import (
    BadState,
    DeskConflict,
    DomainError,
    OccupantBusy,
    OutsideGrace,
    OutsideOperatingHours,
    PastStart,
    UnknownDesk,
    UnknownZone,
    WrongDesk,
)

from conftest import FixedClock, build_campus, local


def test_reserve_two_hour_slot(booking):
    start = local(2025, 3, 3, 9, 0)
    r = booking.reserve("zone-1-desk-1", "occ-a", start)
    assert r.state is ReservationState.RESERVED
    assert r.end - r.start == timedelta(minutes=120)
    assert r.end == local(2025, 3, 3, 11, 0)
    assert r.check_in_time is None


def test_overlapping_reserve_conflicts(booking):
    booking.reserve("zone-1-desk-1", "occ-a", local(2025, 3, 3, 9, 0))
    with pytest.raises(DeskConflict):
        booking.reserve("zone-1-desk-1", "occ-b", local(2025, 3, 3, 10, 0))


def test_same_slot_other_desk_ok(booking):
    booking.reserve("zone-1-desk-1", "occ-a", local(2025, 3, 3, 10, 0))
    r = booking.reserve("zone-1-desk-2", "occ-b", local(2025, 3, 3, 10, 0))
    assert r.state is ReservationState.RESERVED


def test_adjacent_slots_do_not_conflict(booking):
    booking.reserve("zone-1-desk-1", "occ-a", local(2025, 3, 3, 9, 0))
    r = booking.reserve("zone-1-desk-1", "occ-b", local(2025, 3, 3, 11, 0))
    assert r.start == local(2025, 3, 3, 11, 0)


def test_reserve_in_past_rejected(booking, clock):
    with pytest.raises(PastStart):
        booking.reserve("zone-1-desk-1", "occ-a", clock.now - timedelta(minutes=1))


def test_reserve_outside_operating_hours_rejected(booking):
    with pytest.raises(OutsideOperatingHours):
        booking.reserve("zone-1-desk-1", "occ-a", local(2025, 3, 3, 19, 0))


def test_reserve_unknown_desk(booking):
    with pytest.raises(UnknownDesk):
        booking.reserve("desk-x", "occ-a", local(2025, 3, 3, 9, 0))


def test_use_now_starts_in_use(booking, clock):
    r = booking.use_now("tok-01-01", "occ-a")
    assert r.state is ReservationState.IN_USE
    assert r.start == clock.now
    assert r.check_in_time == clock.now
    assert r.end == clock.now + timedelta(minutes=120)


def test_use_now_on_active_session_conflicts(booking):
    booking.use_now("tok-01-01", "occ-a")
    with pytest.raises(DeskConflict):
        booking.use_now("tok-01-01", "occ-b")


def test_use_now_must_not_eat_future_booking(booking, clock):
    booking.reserve("zone-1-desk-1", "occ-a", clock.now + timedelta(minutes=90))
    with pytest.raises(DeskConflict):
        booking.use_now("tok-01-01", "occ-b")


def test_one_active_reservation_per_occupant(booking, clock):
    booking.use_now("tok-01-01", "occ-a")
    with pytest.raises(OccupantBusy):
        booking.reserve("zone-2-desk-1", "occ-a", clock.now + timedelta(hours=3))


def test_check_in_within_grace(booking, clock):
    start = clock.now + timedelta(minutes=30)
    r = booking.reserve("zone-1-desk-1", "occ-a", start)
    checked = booking.check_in(r.reservation_id, "tok-01-01", now=start + timedelta(minutes=5))
    assert checked.state is ReservationState.IN_USE
    assert checked.check_in_time == start + timedelta(minutes=5)


def test_check_in_wrong_desk(booking, clock):
    r = booking.reserve("zone-1-desk-1", "occ-a", clock.now + timedelta(minutes=30))
    with pytest.raises(WrongDesk):
        booking.check_in(r.reservation_id, "tok-01-02", now=r.start)


def test_check_in_after_grace(booking, clock):
    r = booking.reserve("zone-1-desk-1", "occ-a", clock.now + timedelta(minutes=30))
    with pytest.raises(OutsideGrace):
        booking.check_in(r.reservation_id, "tok-01-01", now=r.start + timedelta(minutes=20))


def test_check_in_at_grace_boundary(booking, clock):
    r = booking.reserve("zone-1-desk-1", "occ-a", clock.now + timedelta(minutes=30))
    checked = booking.check_in(r.reservation_id, "tok-01-01", now=r.start + timedelta(minutes=15))
    assert checked.state is ReservationState.IN_USE


def test_extend_adds_two_hours(booking, clock):
    r = booking.use_now("tok-01-01", "occ-a")
    extended = booking.extend(r.reservation_id)
    assert extended.end == clock.now + timedelta(minutes=240)
    assert (extended.end - extended.start) == timedelta(minutes=240)


def test_extend_blocked_by_next_reservation(booking, clock):
    r = booking.use_now("tok-01-01", "occ-a")
    booking.reserve("zone-1-desk-1", "occ-b", r.end + timedelta(minutes=30))
    with pytest.raises(DeskConflict):
        booking.extend(r.reservation_id)


def test_extend_completed_session_rejected(booking, clock):
    r = booking.use_now("tok-01-01", "occ-a")
    booking.expire_stale(r.end + timedelta(seconds=1))
    with pytest.raises(BadState):
        booking.extend(r.reservation_id)


def test_no_show_expires_after_grace(booking, clock):
    r = booking.reserve("zone-1-desk-1", "occ-a", clock.now + timedelta(minutes=30))
    touched = booking.expire_stale(r.start + timedelta(minutes=16))
    assert r.reservation_id in touched
    assert booking.get(r.reservation_id).state is ReservationState.EXPIRED


def test_in_use_completes_after_end(booking, clock):
    r = booking.use_now("tok-01-01", "occ-a")
    touched = booking.expire_stale(r.end + timedelta(seconds=1))
    assert r.reservation_id in touched
    assert booking.get(r.reservation_id).state is ReservationState.COMPLETED
    assert booking.get(r.reservation_id).check_in_time is not None


def test_expire_stale_empty_system(booking, clock):
    assert booking.expire_stale(clock.now) == []


def test_prompt_schedule_two_hour_session(booking, clock):
    r = booking.use_now("tok-01-01", "occ-a")
    schedule = booking.prompt_schedule(r.reservation_id)
    assert len(schedule.prompt_times) == 5
    assert schedule.prompt_times[0] == r.start
    assert schedule.prompt_times[-1] == r.end
    deltas = {
        (b - a) for a, b in zip(schedule.prompt_times, schedule.prompt_times[1:])
    }
    assert deltas == {timedelta(minutes=30)}


def test_prompt_schedule_after_extension(booking, clock):
    r = booking.use_now("tok-01-01", "occ-a")
    booking.extend(r.reservation_id)
    schedule = booking.prompt_schedule(r.reservation_id)
    assert len(schedule.prompt_times) == 9
    assert schedule.prompt_times[-1] == r.end


def test_prompt_schedule_cancelled_rejected(booking, clock):
    r = booking.reserve("zone-1-desk-1", "occ-a", clock.now + timedelta(minutes=30))
    booking.cancel(r.reservation_id)
    with pytest.raises(BadState):
        booking.prompt_schedule(r.reservation_id)


def test_cancel_only_from_reserved(booking):
    r = booking.use_now("tok-01-01", "occ-a")
    with pytest.raises(BadState):
        booking.cancel(r.reservation_id)


def test_list_available_subtracts_booked(booking, clock):
    interval = (local(2025, 3, 3, 10, 0), local(2025, 3, 3, 12, 0))
    booking.reserve("zone-1-desk-1", "occ-a", local(2025, 3, 3, 10, 0))
    booking.reserve("zone-1-desk-2", "occ-b", local(2025, 3, 3, 11, 0))
    available = booking.list_available("zone-1", interval)
    assert len(available) == 4
    assert "zone-1-desk-1" not in available and "zone-1-desk-2" not in available


def test_list_available_history_never_blocks(campus, config):
    clock = FixedClock(local(2025, 3, 3, 9, 0))
    booking = BookingService(campus, config, clock=clock)
    r = booking.use_now("tok-01-01", "occ-a")
    booking.expire_stale(r.end + timedelta(seconds=1))  # session now Completed
    past = (r.start, r.end)
    assert len(booking.list_available("zone-1", past)) == 6


def test_list_available_unknown_zone(booking):
    with pytest.raises(UnknownZone):
        booking.list_available("zone-99", (local(2025, 3, 3, 9), local(2025, 3, 3, 11)))


def test_deactivated_desk_not_bookable_and_not_listed(booking, campus, clock):
    campus.deactivate_desk("zone-1-desk-1")
    with pytest.raises(UnknownDesk):
        booking.reserve("zone-1-desk-1", "occ-a", clock.now + timedelta(minutes=30))
    interval = (clock.now, clock.now + timedelta(hours=2))
    assert "zone-1-desk-1" not in booking.list_available("zone-1", interval)


def _assert_store_invariants(booking: BookingService):
    per_desk: dict = {}
    for r in booking.all_reservations():
        assert (r.end - r.start) % timedelta(minutes=120) == timedelta(0)
        assert (r.check_in_time is not None) == (
            r.state in (ReservationState.IN_USE, ReservationState.COMPLETED)
        )
        if r.state in NON_TERMINAL:
            per_desk.setdefault(r.desk_id, []).append((r.start, r.end))
    for intervals in per_desk.values():
        intervals.sort()
        for (s1, e1), (s2, e2) in zip(intervals, intervals[1:]):
            assert e1 <= s2, "overlapping non-terminal reservations on one desk"


@given(data=st.data())
@settings(max_examples=30, deadline=None)
def test_random_op_sequences_keep_invariants(data):
    catalog = Catalog()
    build_campus(catalog, zones=2, desks_per_zone=3)
    clock = FixedClock(local(2025, 3, 3, 8, 0))
    booking = BookingService(catalog, Config(), clock=clock)
    desks = [d.desk_id for d in catalog.desks()]
    tokens = {d.desk_id: d.qr_token for d in catalog.desks()}
    occupants = [f"occ-{i}" for i in range(6)]
    created: list = []
    n_ops = data.draw(st.integers(10, 60))
    for _ in range(n_ops):
        op = data.draw(st.sampled_from(["reserve", "use_now", "check_in", "extend", "expire", "cancel", "tick"]))
        try:
            if op == "reserve":
                desk = data.draw(st.sampled_from(desks))
                occ = data.draw(st.sampled_from(occupants))
                offset = data.draw(st.integers(0, 8)) * 30
                r = booking.reserve(desk, occ, clock.now + timedelta(minutes=offset))
                created.append(r.reservation_id)
            elif op == "use_now":
                desk = data.draw(st.sampled_from(desks))
                occ = data.draw(st.sampled_from(occupants))
                r = booking.use_now(tokens[desk], occ)
                created.append(r.reservation_id)
            elif op == "check_in" and created:
                rid = data.draw(st.sampled_from(created))
                desk = booking.get(rid).desk_id
                booking.check_in(rid, tokens[desk], now=clock.now)
            elif op == "extend" and created:
                booking.extend(data.draw(st.sampled_from(created)))
            elif op == "expire":
                booking.expire_stale(clock.now)
            elif op == "cancel" and created:
                booking.cancel(data.draw(st.sampled_from(created)))
            elif op == "tick":
                clock.advance(minutes=data.draw(st.integers(1, 90)))
                if clock.now.astimezone(Config().tzinfo).hour >= 17:
                    clock.advance(hours=15)
        except DomainError:
            pass
        _assert_store_invariants(booking)
