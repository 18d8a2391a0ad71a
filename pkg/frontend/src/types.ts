// Payload shapes of the workspace service HTTP API. The client renders these
// as-is: the server is the single source of truth for every business rule.

export type Dimension = "thermal" | "visual" | "aural";
export type Vote = "decrease" | "comfortable" | "increase";

export interface ZoneSummary {
  zone_id: string;
  building: string;
  floor: number;
  name: string;
  sensor_id: string;
  desk_count: number;
}

export interface DimensionStats {
  n: number;
  mean: number;
  std: number;
  quantiles: Record<string, number>;
}

export interface SensorReading {
  zone_id: string;
  timestamp: string;
  temp_c: number | null;
  rh_pct: number | null;
  noise_db: number | null;
  lux: number | null;
  co2_ppm: number | null;
  tvoc_ppb: number | null;
  presence: boolean | null;
}

export interface ZoneDashboard {
  zone_id: string;
  latest_reading: SensorReading | null;
  window: [string, string];
  stats: Record<string, DimensionStats | null>;
}

export type ReservationState =
  | "reserved"
  | "in_use"
  | "completed"
  | "expired"
  | "cancelled";

export interface Reservation {
  reservation_id: string;
  desk_id: string;
  zone_id: string;
  start: string;
  end: string;
  state: ReservationState;
  check_in_time: string | null;
}

export interface PromptsResponse {
  reservation_id: string;
  prompt_times: string[];
}

export interface DimensionProfile {
  label: string;
  text: string;
  cluster: number | null;
  n_votes: number;
}

export interface OccupantProfile {
  occupant_id: string;
  dimensions: Record<Dimension, DimensionProfile>;
}

export interface Recommendation {
  desk_id: string;
  zone_id: string;
  overall: number;
  levels: Record<Dimension, number>;
}

export interface RecommendationsResponse {
  at: string;
  recommendations: Recommendation[];
}

export interface AvailableDesks {
  zone_id: string;
  available: string[];
}

export interface Identity {
  occupant_id: string;
  created_at: string;
  display_alias: string | null;
}
