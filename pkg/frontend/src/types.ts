// DTOs mirroring the service's /api/v1 JSON bodies.

export interface PageDto {
  id: string;
  name: string;
  description: string;
  status: "pending" | "generated" | "failed";
  file_manifest: string[];
}

export interface FeatureDto {
  id: string;
  description: string;
}

export interface ProjectDto {
  id: string;
  name: string;
  context_description: string;
  stack_profile_id: string;
  created_at: string;
  head_snapshot: string | null;
  pages: PageDto[];
  predefined_features: FeatureDto[];
}

export interface ProfileDto {
  id: string;
  display_name: string;
  predefined_features: FeatureDto[];
}

export interface JobResultDto {
  snapshot_id: string | null;
  narrative: string;
  applied: [string, string][];
  rejected: [string, string][];
  warnings: string[];
  flags: string[];
  request_id: number;
}

export interface JobTicketDto {
  id: string;
  project_id: string;
  kind: string;
  state: "queued" | "running" | "done" | "failed";
  result: JobResultDto | null;
  error: string | null;
}

export interface SnapshotNodeDto {
  id: string;
  parent: string | null;
  label: string | null;
  tree_digest: string;
  prompt_record_id: number | null;
  created_at: string;
  seq: number;
}

export interface GraphDto {
  head: string | null;
  root: string | null;
  active_path: string[];
  abandoned_branches: string[][];
  discarded_count: number;
  nodes: SnapshotNodeDto[];
}

export interface HistoryEntryDto {
  request: {
    id: number;
    kind: string;
    page_id: string | null;
    model_id: string;
    temperature: number;
    sent_at: string;
    messages: { role: string; text: string }[];
    injected_paths: string[];
  };
  response: {
    id: number;
    text: string;
    token_usage: [number, number];
    latency_ms: number;
    finish_reason: string;
  } | null;
}

export interface RunHandleDto {
  project_id: string;
  state: "starting" | "running" | "failed" | "stopped";
  preview_url: string;
  ports: Record<string, number>;
  pids: Record<string, number>;
  started_at: string;
  log_tail: string[];
}

export interface FilesDto {
  paths: string[];
  tree_digest: string | null;
}

export type PromptKind = "Initial" | "Feature" | "BugFix" | "Layout" | "Transition";
