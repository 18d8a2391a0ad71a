from datetime import timedelta

import pytest

from flexdesk.config import Config
from flexdesk.errors import CorruptLog
from flexdesk.feedback import ComfortVote, Dimension, Preference
from flexdesk.service import EVENTS_FILE, ServiceCore, seed_scenario
from flexdesk.simgen import desk_scale_spec, generate

from conftest import FixedClock, local, mk_reading
from test_catalog import zone as make_zone
from flexdesk.catalog import Desk


def _workload(core: ServiceCore, clock: FixedClock):
    """A little bit of everything: catalog, readings, sessions, votes, models."""
    core.register_zone(make_zone("zone-1", desks=("zone-1-desk-1", "zone-1-desk-2")))
    core.register_desk(Desk("zone-1-desk-1", "zone-1", "Z1/1", "tok-1"))
    core.register_desk(Desk("zone-1-desk-2", "zone-1", "Z1/2", "tok-2"))
    alice = core.onboard_occupant(display_alias="alice")
    bob = core.onboard_occupant(display_alias="bob")

    for i in range(40):
        core.ingest_reading(
            mk_reading(ts=clock.now + timedelta(minutes=5 * i - 60), temp=23.0 + (i % 5) * 0.3)
        )
    core.ingest_reading(mk_reading(ts=clock.now, temp=99.0))  # quarantined

    session = core.use_now("tok-1", alice.occupant_id)
    core.submit_feedback(
        session.reservation_id,
        [ComfortVote(Dimension.THERMAL, Preference.DECREASE),
         ComfortVote(Dimension.VISUAL, Preference.COMFORTABLE)],
        now=clock.now + timedelta(minutes=30),
    )
    reservation = core.reserve("zone-1-desk-2", bob.occupant_id, clock.now + timedelta(minutes=60))
    core.check_in(reservation.reservation_id, "tok-2", now=reservation.start + timedelta(minutes=5))
    core.extend(session.reservation_id)
    core.expire_stale(now=clock.now + timedelta(minutes=1))
    return alice, bob, session


def test_replay_reproduces_state_bit_for_bit(tmp_path):
    clock = FixedClock(local(2025, 3, 3, 9, 0))
    core = ServiceCore(Config(), data_dir=tmp_path, clock=clock)
    _workload(core, clock)
    before = core.state_bytes()

    replayed = ServiceCore(Config(), data_dir=tmp_path, clock=clock)
    assert replayed.state_bytes() == before


def test_replay_after_simulated_crash_matches_snapshot(tmp_path):
    clock = FixedClock(local(2025, 3, 3, 9, 0))
    core = ServiceCore(Config(), data_dir=tmp_path, clock=clock)
    _workload(core, clock)
    snapshot = core.write_snapshot(tmp_path / "snapshots" / "pre-crash.json")
    del core  # crash: nothing flushed beyond the append-only log

    recovered = ServiceCore(Config(), data_dir=tmp_path, clock=clock)
    assert recovered.state_bytes() == snapshot.read_bytes()


def test_replay_of_every_prefix_is_valid(tmp_path):
    clock = FixedClock(local(2025, 3, 3, 9, 0))
    core = ServiceCore(Config(), data_dir=tmp_path, clock=clock)
    _workload(core, clock)
    log_path = tmp_path / EVENTS_FILE
    lines = log_path.read_text().splitlines()
    for cut in range(len(lines) + 1):
        prefix_dir = tmp_path / f"prefix-{cut}"
        prefix_dir.mkdir()
        (prefix_dir / EVENTS_FILE).write_text("\n".join(lines[:cut]) + ("\n" if cut else ""))
        partial = ServiceCore(Config(), data_dir=prefix_dir, clock=clock)
        partial.state_bytes()  # serializable, invariants intact


def test_corrupt_log_refuses_to_boot(tmp_path):
    clock = FixedClock(local(2025, 3, 3, 9, 0))
    core = ServiceCore(Config(), data_dir=tmp_path, clock=clock)
    _workload(core, clock)
    log_path = tmp_path / EVENTS_FILE
    lines = log_path.read_text().splitlines()
    log_path.write_text("\n".join(lines[:3] + lines[4:]) + "\n")  # drop event 4
    with pytest.raises(CorruptLog):
        ServiceCore(Config(), data_dir=tmp_path, clock=clock)


def test_quarantined_readings_replay_into_quarantine(tmp_path):
    clock = FixedClock(local(2025, 3, 3, 9, 0))
    core = ServiceCore(Config(), data_dir=tmp_path, clock=clock)
    _workload(core, clock)
    assert len(core.telemetry.quarantine) == 1
    replayed = ServiceCore(Config(), data_dir=tmp_path, clock=clock)
    assert len(replayed.telemetry.quarantine) == 1


def test_models_and_matrix_replay_from_log(tmp_path):
    scenario = generate(desk_scale_spec(seed=5))
    core = ServiceCore(Config(), data_dir=tmp_path)
    seed_scenario(core, scenario)
    core.recompute_profiles()
    end = max(r.timestamp for r in scenario.readings)
    core.recompute_matrix(now=end)
    before = core.state_bytes()

    replayed = ServiceCore(Config(), data_dir=tmp_path)
    assert replayed.state_bytes() == before
    assert replayed.models.latest(Dimension.THERMAL) is not None
    assert replayed.matrix is not None


def test_empty_log_empty_state(tmp_path):
    core = ServiceCore(Config(), data_dir=tmp_path)
    assert core.catalog.zones() == []
    assert core.booking.all_reservations() == []
    state = core.state_dict()
    assert state["reservations"] == [] and state["feedback"] == []


def test_expire_event_only_logged_when_something_changed(tmp_path):
    clock = FixedClock(local(2025, 3, 3, 9, 0))
    core = ServiceCore(Config(), data_dir=tmp_path, clock=clock)
    core.expire_stale()
    log_path = tmp_path / EVENTS_FILE
    assert not log_path.exists() or "stale_expired" not in log_path.read_text()


def test_occupant_profile_via_core(tmp_path):
    scenario = generate(desk_scale_spec(seed=5))
    core = ServiceCore(Config())
    seed_scenario(core, scenario)
    core.recompute_profiles()
    occ = sorted(scenario.ground_truth.type_by_occupant)[0]
    profile = core.occupant_profile(occ)
    assert set(profile.dimensions) == set(Dimension)


def test_availability_pairs_cover_free_desks():
    clock = FixedClock(local(2025, 3, 3, 9, 0))
    core = ServiceCore(Config(), clock=clock)
    core.register_zone(make_zone("zone-1", desks=("zone-1-desk-1", "zone-1-desk-2")))
    core.register_desk(Desk("zone-1-desk-1", "zone-1", "Z1/1", "tok-1"))
    core.register_desk(Desk("zone-1-desk-2", "zone-1", "Z1/2", "tok-2"))
    occ = core.onboard_occupant()
    core.use_now("tok-1", occ.occupant_id)
    pairs = core.availability_pairs(clock.now)
    assert pairs == [("zone-1", "zone-1-desk-2")]
