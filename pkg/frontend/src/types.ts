// Wire types mirroring the design service's JSON documents.

export interface LotDoc {
  width: number;
  depth: number;
  location_tag: string;
}

export interface InstanceDoc {
  id: string;
  entry: string;
  x: number;
  y: number;
  rot: number;
  scale: number;
}

export interface SceneDoc {
  format_version: "1";
  lot: LotDoc;
  scenario_id: string | null;
  instances: InstanceDoc[];
}

export interface EntryDoc {
  entry_id: string;
  display_name: string;
  category: string;
  footprint_w: number;
  footprint_d: number;
  height?: number;
  canopy_radius?: number;
  light_radius?: number;
  seat_capacity?: number;
  play_capacity?: number;
  adult_activity_capacity?: number;
  green_area?: number;
  tags?: string[];
  patterns?: string[];
}

export interface ScenarioDoc {
  scenario_id: string;
  group: string;
  brief: string;
  designated_metrics: string[];
  suggested_entries: string[];
  note?: string;
}

export interface CatalogDoc {
  version: string;
  entries: EntryDoc[];
  scenarios: ScenarioDoc[];
}

export type MetricScores = Record<string, number>;

export interface ScoreResponse {
  scores: MetricScores;
  breakdown: Record<string, unknown>;
}

export interface PairDeviationDoc {
  target_id: string;
  candidate_id: string;
  pos_delta: number;
  rot_delta: number;
  scale_delta: number;
}

export interface MatchReportDoc {
  passed: boolean;
  matched_pairs: [string, string][];
  missing: string[];
  extras: string[];
  per_pair_deviations: PairDeviationDoc[];
}

export interface AssignmentDoc {
  participant_id: string;
  group: string;
  scenario_order: string[];
  issued_at?: string;
}

export interface PracticeResponse {
  scene: string; // the practice scene document text
  tolerances: { pos_eps: number; rot_eps: number; scale_eps: number };
}

export interface ApiErrorBody {
  code: string;
  message: string;
  details: unknown[];
}

export const METRICS = [
  "shade",
  "play",
  "comfort",
  "safety",
  "nature",
  "recreation",
  "entertainment",
  "sociability",
] as const;

export type MetricId = (typeof METRICS)[number];
