// Pure view-state derivation. The screen shown is a function of server
// responses plus local navigation; nothing here talks to the network, and no
// business rule lives here. Reloading the page rebuilds the same view from
// the same server state.

import type {
  Recommendation,
  Reservation,
  ZoneDashboard,
  ZoneSummary,
} from "./types.js";

export type Screen =
  | "onboarding"
  | "zone-finder"
  | "zone-dashboard"
  | "booking"
  | "session"
  | "feedback-prompt"
  | "profile";

export interface ZoneCard {
  zone: ZoneSummary;
  matchBadge: number | null; // best overall among the zone's recommended desks
  freeDesks: number | null;
}

export interface ViewState {
  token: string | null;
  navigation: Screen; // where the user intends to be
  zones: ZoneSummary[];
  recommendations: Recommendation[];
  recommendationsAt: string | null;
  selectedZone: string | null;
  dashboard: ZoneDashboard | null;
  reservation: Reservation | null;
  promptTimes: string[];
  answeredPrompts: string[];
  dismissedPrompts: string[];
  profile: import("./types.js").OccupantProfile | null;
  notice: string | null;
  error: string | null; // server messages, shown verbatim
  offline: boolean;
}

export function initialState(token: string | null): ViewState {
  return {
    token,
    navigation: "zone-finder",
    zones: [],
    recommendations: [],
    recommendationsAt: null,
    selectedZone: null,
    dashboard: null,
    reservation: null,
    promptTimes: [],
    answeredPrompts: [],
    dismissedPrompts: [],
    profile: null,
    notice: null,
    error: null,
    offline: false,
  };
}

export function sessionActive(reservation: Reservation | null): boolean {
  return reservation !== null && (reservation.state === "reserved" || reservation.state === "in_use");
}

/** Prompts that have come due and were neither answered nor dismissed. */
export function pendingPrompts(state: ViewState, nowIso: string): string[] {
  if (state.reservation?.state !== "in_use") return [];
  const now = Date.parse(nowIso);
  const seen = new Set([...state.answeredPrompts, ...state.dismissedPrompts]);
  return state.promptTimes.filter((t) => Date.parse(t) <= now && !seen.has(t));
}

/**
 * The screen actually shown. A feedback prompt can only surface over an
 * in-use session; otherwise the user's navigation wins, except that holding
 * an active reservation pins the session screen in front of booking flows.
 */
export function deriveScreen(state: ViewState, nowIso: string): Screen {
  if (!state.token) return "onboarding";
  if (pendingPrompts(state, nowIso).length > 0) return "feedback-prompt";
  if (state.navigation === "session" || state.navigation === "booking") {
    return sessionActive(state.reservation) ? "session" : state.navigation;
  }
  return state.navigation;
}

export interface ZoneOrdering {
  cards: ZoneCard[];
  notice: string | null;
}

/**
 * Zone-finder ordering: zones ranked by their best recommended desk. With no
 * recommendations to go by (new user, nothing published, campus full) the
 * list falls back to alphabetical with a profile-building notice.
 */
export function orderZones(
  zones: ZoneSummary[],
  recommendations: Recommendation[],
): ZoneOrdering {
  const bestByZone = new Map<string, number>();
  const freeByZone = new Map<string, number>();
  for (const rec of recommendations) {
    freeByZone.set(rec.zone_id, (freeByZone.get(rec.zone_id) ?? 0) + 1);
    const prev = bestByZone.get(rec.zone_id);
    if (prev === undefined || rec.overall > prev) bestByZone.set(rec.zone_id, rec.overall);
  }
  const cards: ZoneCard[] = zones.map((zone) => ({
    zone,
    matchBadge: bestByZone.get(zone.zone_id) ?? null,
    freeDesks: freeByZone.get(zone.zone_id) ?? null,
  }));
  if (recommendations.length === 0) {
    cards.sort((a, b) => a.zone.zone_id.localeCompare(b.zone.zone_id));
    return { cards, notice: "building your profile - zones shown alphabetically" };
  }
  const rank = new Map<string, number>();
  recommendations.forEach((rec, i) => {
    if (!rank.has(rec.zone_id)) rank.set(rec.zone_id, i);
  });
  cards.sort((a, b) => {
    const ra = rank.get(a.zone.zone_id) ?? Number.MAX_SAFE_INTEGER;
    const rb = rank.get(b.zone.zone_id) ?? Number.MAX_SAFE_INTEGER;
    return ra === rb ? a.zone.zone_id.localeCompare(b.zone.zone_id) : ra - rb;
  });
  return { cards, notice: null };
}

/** Half-hour start slots for the booking grid (presentation only: the server
 * still validates every start it receives). */
export function bookingSlots(nowIso: string, count = 8): string[] {
  const now = new Date(nowIso);
  const slot = new Date(now);
  slot.setSeconds(0, 0);
  const m = slot.getMinutes();
  slot.setMinutes(m <= 30 ? 30 : 60);
  const out: string[] = [];
  for (let i = 0; i < count; i++) {
    out.push(new Date(slot.getTime() + i * 30 * 60_000).toISOString());
  }
  return out;
}
