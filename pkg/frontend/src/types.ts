// API payload shapes, mirroring the service's OpenAPI schema one to one.
// The dashboard displays these fields verbatim; it never derives numbers
// the API does not already expose.

export interface CampaignSummary {
  id: string;
  strategy: string;
  status: "running" | "stopped" | "finished";
  executions: number;
  buckets_found: number;
  covered: number;
}

export interface ClassificationCounts {
  verified: number;
  clean_error: number;
  crash: number;
  timeout: number;
  resource_limit: number;
}

export interface CampaignStats {
  strategy: string;
  status: string;
  started_at: number;
  executions: number;
  classifications: ClassificationCounts;
  buckets_found: number;
  corpus_size: number;
  covered: number;
  coverage: Array<[number, number]>;
  error: string | null;
}

export interface CoveragePoint {
  t: number;
  covered: number;
}

export interface BucketSummary {
  bucket_hash: string;
  exception: string;
  hit_count: number;
  first_seen: number;
  last_seen: number;
  triage_state: "new" | "confirmed" | "duplicate" | "wontfix";
  strategy_first: string;
}

export interface BucketDetail {
  bucket: BucketSummary;
  report: Record<string, unknown>;
  input_b64: string;
  trace_text: string;
  minimized_b64: string | null;
  minimize_info: Record<string, unknown> | null;
}

export interface MinimizeInfo {
  evaluations: number;
  minimal: boolean;
  stable: boolean;
  size_before: number;
  size_after: number;
  granularity: string;
  minimized_b64: string;
}

export interface StartRequest {
  strategy: string;
  target_cmd: string;
  time_budget: number;
  master_seed: number;
  workers: number;
  timeout: number;
  grammar_path: string | null;
  max_depth: number;
  seed_corpus: number;
}

export const STRATEGIES = [
  "blind",
  "blind_coverage",
  "grammar",
  "grammar_coverage",
  "typed",
] as const;

export const TRIAGE_STATES = ["new", "confirmed", "duplicate", "wontfix"] as const;
