// Orchestration: user actions and the 10-second poll both funnel through
// refresh methods that overwrite view state with fresh server responses, then
// hand the state to the renderer. The server stays authoritative throughout.

import { ApiClient, ApiError, NetworkError } from "./api.js";
import {
  deriveScreen,
  initialState,
  pendingPrompts,
  sessionActive,
  type Screen,
  type ViewState,
} from "./state.js";
import type { Vote } from "./types.js";

export interface Renderer {
  render(state: ViewState, screen: Screen): void;
}

export interface ControllerOptions {
  pollIntervalMs?: number;
  now?: () => Date;
  onToken?: (token: string) => void;
}

export class AppController {
  readonly state: ViewState;
  private readonly now: () => Date;
  private readonly pollIntervalMs: number;
  private readonly onToken?: (token: string) => void;
  private pollTimer: ReturnType<typeof setInterval> | null = null;

  constructor(
    private readonly api: ApiClient,
    private readonly renderer: Renderer,
    options: ControllerOptions = {},
  ) {
    this.now = options.now ?? (() => new Date());
    this.pollIntervalMs = options.pollIntervalMs ?? 10_000;
    this.onToken = options.onToken;
    this.state = initialState(api.token);
  }

  nowIso(): string {
    return this.now().toISOString();
  }

  currentScreen(): Screen {
    return deriveScreen(this.state, this.nowIso());
  }

  pending(): string[] {
    return pendingPrompts(this.state, this.nowIso());
  }

  private paint(): void {
    this.renderer.render(this.state, this.currentScreen());
  }

  private async guard<T>(work: () => Promise<T>): Promise<T | null> {
    try {
      const result = await work();
      this.state.error = null;
      this.state.offline = false;
      return result;
    } catch (err) {
      if (err instanceof NetworkError) {
        this.state.offline = true;
      } else if (err instanceof ApiError) {
        this.state.error = `${err.error}: ${err.detail}`;
      } else {
        throw err;
      }
      return null;
    }
  }

  async boot(): Promise<void> {
    if (this.state.token) {
      this.api.token = this.state.token;
      await this.refreshZones();
    }
    this.paint();
  }

  startPolling(): void {
    if (this.pollTimer === null) {
      this.pollTimer = setInterval(() => void this.refresh(), this.pollIntervalMs);
    }
  }

  stopPolling(): void {
    if (this.pollTimer !== null) {
      clearInterval(this.pollTimer);
      this.pollTimer = null;
    }
  }

  /** One poll tick: reservation state, prompt schedule, and zone data. */
  async refresh(): Promise<void> {
    if (!this.state.token) return;
    if (this.state.reservation) {
      const updated = await this.guard(() =>
        this.api.reservation(this.state.reservation!.reservation_id),
      );
      if (updated) {
        this.state.reservation = updated;
        if (sessionActive(updated)) {
          const prompts = await this.guard(() => this.api.prompts(updated.reservation_id));
          if (prompts) this.state.promptTimes = prompts.prompt_times;
        } else {
          this.state.promptTimes = [];
        }
      }
    }
    if (this.currentScreen() === "zone-finder") {
      await this.refreshZones();
    }
    this.paint();
  }

  async onboard(alias?: string): Promise<void> {
    const identity = await this.guard(() => this.api.onboard(alias));
    if (identity) {
      this.state.token = identity.occupant_id;
      this.api.token = identity.occupant_id;
      this.onToken?.(identity.occupant_id);
      await this.refreshZones();
    }
    this.paint();
  }

  async refreshZones(): Promise<void> {
    const zones = await this.guard(() => this.api.zones());
    if (zones) this.state.zones = zones;
    const at = this.nowIso();
    const recs = await this.guard(() => this.api.recommendations(at));
    if (recs) {
      this.state.recommendations = recs.recommendations;
      this.state.recommendationsAt = recs.at;
    } else {
      // no published matrix yet, or nothing free: the finder falls back
      this.state.recommendations = [];
      this.state.recommendationsAt = null;
    }
  }

  async openZone(zoneId: string): Promise<void> {
    const dashboard = await this.guard(() => this.api.dashboard(zoneId));
    if (dashboard) {
      this.state.selectedZone = zoneId;
      this.state.dashboard = dashboard;
      this.state.navigation = "zone-dashboard";
    }
    this.paint();
  }

  openBooking(): void {
    this.state.navigation = "booking";
    this.paint();
  }

  backToFinder(): void {
    this.state.navigation = "zone-finder";
    this.state.selectedZone = null;
    this.state.dashboard = null;
    void this.refreshZones().then(() => this.paint());
    this.paint();
  }

  async useNow(code: string): Promise<void> {
    const reservation = await this.guard(() => this.api.useNow(code));
    if (reservation) {
      this.state.reservation = reservation;
      this.state.answeredPrompts = [];
      this.state.dismissedPrompts = [];
      this.state.navigation = "session";
      const prompts = await this.guard(() => this.api.prompts(reservation.reservation_id));
      if (prompts) this.state.promptTimes = prompts.prompt_times;
    }
    this.paint();
  }

  async reserveDesk(deskId: string, startIso: string): Promise<void> {
    const reservation = await this.guard(() => this.api.reserve(deskId, startIso));
    if (reservation) {
      this.state.reservation = reservation;
      this.state.answeredPrompts = [];
      this.state.dismissedPrompts = [];
      this.state.promptTimes = [];
      this.state.navigation = "session";
    }
    this.paint();
  }

  async checkIn(code: string): Promise<void> {
    if (!this.state.reservation) return;
    const reservation = await this.guard(() =>
      this.api.checkIn(this.state.reservation!.reservation_id, code),
    );
    if (reservation) {
      this.state.reservation = reservation;
      const prompts = await this.guard(() => this.api.prompts(reservation.reservation_id));
      if (prompts) this.state.promptTimes = prompts.prompt_times;
    }
    this.paint();
  }

  async extendSession(): Promise<void> {
    if (!this.state.reservation) return;
    const reservation = await this.guard(() =>
      this.api.extend(this.state.reservation!.reservation_id),
    );
    if (reservation) {
      this.state.reservation = reservation;
      const prompts = await this.guard(() => this.api.prompts(reservation.reservation_id));
      if (prompts) this.state.promptTimes = prompts.prompt_times;
    }
    this.paint();
  }

  async cancelReservation(): Promise<void> {
    if (!this.state.reservation) return;
    const reservation = await this.guard(() =>
      this.api.cancel(this.state.reservation!.reservation_id),
    );
    if (reservation) {
      this.state.reservation = reservation;
      this.state.promptTimes = [];
      this.state.navigation = "zone-finder";
    }
    this.paint();
  }

  /** Submit votes for the oldest due prompt. Partial submissions are fine. */
  async answerPrompt(votes: Partial<Record<string, Vote>>): Promise<void> {
    const due = this.pending();
    const target = due[0];
    if (!this.state.reservation || !target) return;
    const posted = await this.guard(() =>
      this.api.submitFeedback(this.state.reservation!.reservation_id, votes),
    );
    if (posted) {
      this.state.answeredPrompts = [...this.state.answeredPrompts, target];
    } else if (this.state.error?.startsWith("BadState")) {
      // session ended under us: the prompt is stale, drop it silently
      this.state.dismissedPrompts = [...this.state.dismissedPrompts, target];
      this.state.error = null;
    }
    this.paint();
  }

  /** Dismissal is purely local: no votes, no API call. */
  dismissPrompt(): void {
    const due = this.pending();
    const target = due[0];
    if (target) {
      this.state.dismissedPrompts = [...this.state.dismissedPrompts, target];
    }
    this.paint();
  }

  async showProfile(): Promise<void> {
    const profile = await this.guard(() => this.api.profile());
    if (profile) {
      this.state.profile = profile;
      this.state.navigation = "profile";
    }
    this.paint();
  }
}
