// Thin typed client over the HTTP API. Every error carries the server's own
// error name and detail, which the UI displays verbatim.

import type {
  AvailableDesks,
  Identity,
  OccupantProfile,
  PromptsResponse,
  RecommendationsResponse,
  Reservation,
  Vote,
  ZoneDashboard,
  ZoneSummary,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly error: string,
    public readonly detail: string,
  ) {
    super(`${error}: ${detail}`);
  }
}

export class NetworkError extends Error {}

type FetchLike = typeof fetch;

export class ApiClient {
  token: string | null = null;

  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike = fetch,
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    let response: Response;
    try {
      response = await this.fetchFn(this.baseUrl + path, {
        method,
        headers,
        body: body === undefined ? undefined : JSON.stringify(body),
      });
    } catch (err) {
      throw new NetworkError(String(err));
    }
    if (!response.ok) {
      let error = `HTTP ${response.status}`;
      let detail = response.statusText;
      try {
        const payload = (await response.json()) as { error?: string; detail?: unknown };
        if (payload.error) error = payload.error;
        if (payload.detail !== undefined) detail = JSON.stringify(payload.detail).replace(/^"|"$/g, "");
      } catch {
        // non-JSON error body; keep status text
      }
      throw new ApiError(response.status, error, detail);
    }
    return (await response.json()) as T;
  }

  onboard(alias?: string): Promise<Identity> {
    return this.request<Identity>("POST", "/occupants", { display_alias: alias ?? null });
  }

  zones(): Promise<ZoneSummary[]> {
    return this.request<ZoneSummary[]>("GET", "/zones");
  }

  dashboard(zoneId: string): Promise<ZoneDashboard> {
    return this.request<ZoneDashboard>("GET", `/zones/${zoneId}/dashboard`);
  }

  availableDesks(zoneId: string, fromIso: string, toIso: string): Promise<AvailableDesks> {
    const params = new URLSearchParams({ from: fromIso, to: toIso });
    return this.request<AvailableDesks>("GET", `/zones/${zoneId}/desks?${params}`);
  }

  reserve(deskId: string, startIso: string): Promise<Reservation> {
    return this.request<Reservation>("POST", "/reservations", {
      desk_id: deskId,
      start: startIso,
    });
  }

  useNow(code: string): Promise<Reservation> {
    return this.request<Reservation>("POST", "/use-now", { qr_token: code });
  }

  reservation(id: string): Promise<Reservation> {
    return this.request<Reservation>("GET", `/reservations/${id}`);
  }

  checkIn(id: string, code: string): Promise<Reservation> {
    return this.request<Reservation>("POST", `/reservations/${id}/checkin`, { qr_token: code });
  }

  extend(id: string): Promise<Reservation> {
    return this.request<Reservation>("POST", `/reservations/${id}/extend`);
  }

  cancel(id: string): Promise<Reservation> {
    return this.request<Reservation>("POST", `/reservations/${id}/cancel`);
  }

  prompts(id: string): Promise<PromptsResponse> {
    return this.request<PromptsResponse>("GET", `/reservations/${id}/prompts`);
  }

  submitFeedback(reservationId: string, votes: Partial<Record<string, Vote>>): Promise<unknown> {
    return this.request("POST", "/feedback", { reservation_id: reservationId, votes });
  }

  profile(): Promise<OccupantProfile> {
    return this.request<OccupantProfile>("GET", "/occupants/me/profile");
  }

  recommendations(atIso?: string): Promise<RecommendationsResponse> {
    const suffix = atIso ? `?at=${encodeURIComponent(atIso)}` : "";
    return this.request<RecommendationsResponse>("GET", `/recommendations${suffix}`);
  }
}
