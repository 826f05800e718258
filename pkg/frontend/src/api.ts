// Typed client for the service API. Every datum the UI shows comes through
// here; the UI never fabricates state.

import type {
  FilesDto,
  GraphDto,
  HistoryEntryDto,
  JobTicketDto,
  PageDto,
  ProfileDto,
  ProjectDto,
  PromptKind,
  RunHandleDto,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public status: number,
    public code: string,
    message: string,
  ) {
    super(message);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    public baseUrl: string,
    public token: string | null = null,
    private fetchImpl: FetchLike = (...args) => globalThis.fetch(...args),
  ) {
    this.baseUrl = baseUrl.replace(/\/+$/, "");
  }

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const headers: Record<string, string> = { "Content-Type": "application/json" };
    if (this.token) headers["Authorization"] = `Bearer ${this.token}`;
    const response = await this.fetchImpl(`${this.baseUrl}/api/v1${path}`, {
      method,
      headers,
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    if (!response.ok) {
      let code = "http-error";
      let message = `${method} ${path} failed with ${response.status}`;
      try {
        const payload = (await response.json()) as { code?: string; message?: string };
        code = payload.code ?? code;
        message = payload.message ?? message;
      } catch {
        // non-JSON error body; keep defaults
      }
      throw new ApiError(response.status, code, message);
    }
    return (await response.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/health");
  }

  listProfiles(): Promise<ProfileDto[]> {
    return this.request("GET", "/profiles");
  }

  createProject(name: string, contextDescription: string, stackProfile: string): Promise<ProjectDto> {
    return this.request("POST", "/projects", {
      name,
      context_description: contextDescription,
      stack_profile: stackProfile,
    });
  }

  listProjects(): Promise<ProjectDto[]> {
    return this.request("GET", "/projects");
  }

  getProject(id: string): Promise<ProjectDto> {
    return this.request("GET", `/projects/${id}`);
  }

  addPage(projectId: string, name: string, description: string): Promise<PageDto> {
    return this.request("POST", `/projects/${projectId}/pages`, { name, description });
  }

  submitPrompt(
    projectId: string,
    pageId: string,
    kind: PromptKind,
    text: string,
    targetPageId?: string,
  ): Promise<JobTicketDto> {
    return this.request("POST", `/projects/${projectId}/prompts`, {
      page_id: pageId,
      kind,
      text,
      target_page_id: targetPageId ?? null,
    });
  }

  getJob(ticketId: string): Promise<JobTicketDto> {
    return this.request("GET", `/jobs/${ticketId}`);
  }

  rollback(projectId: string): Promise<{ snapshot_id: string; parent: string | null }> {
    return this.request("POST", `/projects/${projectId}/rollback`);
  }

  checkout(projectId: string, snapshotId: string): Promise<{ snapshot_id: string }> {
    return this.request("POST", `/projects/${projectId}/checkout`, { snapshot_id: snapshotId });
  }

  applyFeature(projectId: string, featureId: string): Promise<{ snapshot_id: string; label: string }> {
    return this.request("POST", `/projects/${projectId}/features/${featureId}`);
  }

  getGraph(projectId: string): Promise<GraphDto> {
    return this.request("GET", `/projects/${projectId}/graph`);
  }

  getHistory(projectId: string): Promise<HistoryEntryDto[]> {
    return this.request("GET", `/projects/${projectId}/history`);
  }

  getFiles(projectId: string): Promise<FilesDto> {
    return this.request("GET", `/projects/${projectId}/files`);
  }

  run(projectId: string): Promise<RunHandleDto> {
    return this.request("POST", `/projects/${projectId}/run`);
  }

  stop(projectId: string): Promise<RunHandleDto> {
    return this.request("POST", `/projects/${projectId}/stop`);
  }

  runStatus(projectId: string): Promise<RunHandleDto> {
    return this.request("GET", `/projects/${projectId}/run`);
  }
}
