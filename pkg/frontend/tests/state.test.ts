import { describe, expect, it } from "vitest";

import {
  bookingSlots,
  deriveScreen,
  initialState,
  orderZones,
  pendingPrompts,
} from "../src/state.js";
import type { Recommendation, Reservation, ZoneSummary } from "../src/types.js";

function zone(id: string): ZoneSummary {
  return {
    zone_id: id,
    building: "building-1",
    floor: 1,
    name: `Zone ${id}`,
    sensor_id: `sensor-${id}`,
    desk_count: 6,
  };
}

function rec(zoneId: string, deskId: string, overall: number): Recommendation {
  return {
    zone_id: zoneId,
    desk_id: deskId,
    overall,
    levels: { thermal: overall, visual: overall, aural: overall },
  };
}

function reservation(state: Reservation["state"], startIso: string): Reservation {
  return {
    reservation_id: "res-1",
    desk_id: "zone-1-desk-1",
    zone_id: "zone-1",
    start: startIso,
    end: new Date(Date.parse(startIso) + 2 * 3600_000).toISOString(),
    state,
    check_in_time: state === "in_use" ? startIso : null,
  };
}

describe("screen derivation", () => {
  it("shows onboarding without a token", () => {
    const state = initialState(null);
    expect(deriveScreen(state, new Date().toISOString())).toBe("onboarding");
  });

  it("only surfaces the feedback prompt over an in-use session", () => {
    const now = "2025-03-03T02:00:00Z";
    const state = initialState("token");
    state.navigation = "session";
    state.promptTimes = [now];

    state.reservation = reservation("reserved", now);
    expect(deriveScreen(state, now)).toBe("session");

    state.reservation = reservation("in_use", now);
    expect(deriveScreen(state, now)).toBe("feedback-prompt");

    state.answeredPrompts = [now];
    expect(deriveScreen(state, now)).toBe("session");
  });

  it("never surfaces prompts for expired sessions", () => {
    const now = "2025-03-03T02:00:00Z";
    const state = initialState("token");
    state.navigation = "session";
    state.reservation = reservation("expired", now);
    state.promptTimes = [now];
    expect(pendingPrompts(state, now)).toEqual([]);
    expect(deriveScreen(state, now)).toBe("session");
  });
});

describe("pending prompt queue", () => {
  it("queues due prompts and drops answered or dismissed ones", () => {
    const start = "2025-03-03T02:00:00Z";
    const state = initialState("token");
    state.reservation = reservation("in_use", start);
    state.promptTimes = [
      "2025-03-03T02:00:00Z",
      "2025-03-03T02:30:00Z",
      "2025-03-03T03:00:00Z",
    ];
    const atHalfPast = "2025-03-03T02:31:00Z";
    expect(pendingPrompts(state, atHalfPast)).toEqual([
      "2025-03-03T02:00:00Z",
      "2025-03-03T02:30:00Z",
    ]);
    state.answeredPrompts = ["2025-03-03T02:00:00Z"];
    state.dismissedPrompts = ["2025-03-03T02:30:00Z"];
    expect(pendingPrompts(state, atHalfPast)).toEqual([]);
  });
});

describe("zone finder ordering", () => {
  it("orders zones by recommendation rank with best-overall badges", () => {
    const zones = [zone("zone-1"), zone("zone-2"), zone("zone-3")];
    const recs = [
      rec("zone-3", "zone-3-desk-1", 0.9),
      rec("zone-3", "zone-3-desk-2", 0.9),
      rec("zone-1", "zone-1-desk-1", 0.6),
      rec("zone-2", "zone-2-desk-1", 0.2),
    ];
    const { cards, notice } = orderZones(zones, recs);
    expect(notice).toBeNull();
    expect(cards.map((c) => c.zone.zone_id)).toEqual(["zone-3", "zone-1", "zone-2"]);
    expect(cards[0]?.matchBadge).toBeCloseTo(0.9);
    expect(cards[0]?.freeDesks).toBe(2);
  });

  it("falls back to alphabetical with a notice when nothing is recommended", () => {
    const zones = [zone("zone-2"), zone("zone-1")];
    const { cards, notice } = orderZones(zones, []);
    expect(cards.map((c) => c.zone.zone_id)).toEqual(["zone-1", "zone-2"]);
    expect(notice).toMatch(/building your profile/);
  });

  it("keeps fully-booked zones listed, after recommended ones", () => {
    const zones = [zone("zone-1"), zone("zone-2")];
    const recs = [rec("zone-2", "zone-2-desk-1", 0.5)];
    const { cards } = orderZones(zones, recs);
    expect(cards.map((c) => c.zone.zone_id)).toEqual(["zone-2", "zone-1"]);
    expect(cards[1]?.matchBadge).toBeNull();
  });
});

describe("booking grid", () => {
  it("offers half-hour slots from the next mark", () => {
    const slots = bookingSlots("2025-03-03T02:12:00Z", 4);
    expect(slots).toHaveLength(4);
    for (const slot of slots) {
      const minutes = new Date(slot).getUTCMinutes();
      expect([0, 30]).toContain(minutes);
      expect(Date.parse(slot)).toBeGreaterThan(Date.parse("2025-03-03T02:12:00Z"));
    }
    const gaps = slots.slice(1).map((s, i) => Date.parse(s) - Date.parse(slots[i]!));
    expect(gaps).toEqual([1800_000, 1800_000, 1800_000]);
  });
});
