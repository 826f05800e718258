// Headless UI session: all state transitions live here so they can be
// tested (and driven against a real service) without a DOM.
//
// Invariant: at most one prompt in flight. submitPrompt guards
// synchronously, mirroring the server's single-writer rule, so the UI can
// simply disable inputs while `promptInFlight` is true.

import { ApiError, type ApiClient } from "./api.js";
import type {
  GraphDto,
  HistoryEntryDto,
  JobTicketDto,
  PageDto,
  ProjectDto,
  PromptKind,
  RunHandleDto,
} from "./types.js";

export interface SessionState {
  project: ProjectDto | null;
  activePageId: string | null;
  pendingTicket: JobTicketDto | null;
  lastTicket: JobTicketDto | null;
  graph: GraphDto | null;
  history: HistoryEntryDto[];
  files: string[];
  run: RunHandleDto | null;
  error: string | null;
}

export interface PollingPolicy {
  initialMs: number;
  maxMs: number;
  factor: number;
}

// Provider latency dominates; poll gently and back off.
export const DEFAULT_POLLING: PollingPolicy = { initialMs: 1000, maxMs: 5000, factor: 1.5 };

export function pollingDelays(policy: PollingPolicy, attempts: number): number[] {
  const delays: number[] = [];
  let delay = policy.initialMs;
  for (let i = 0; i < attempts; i++) {
    delays.push(Math.round(Math.min(delay, policy.maxMs)));
    delay = delay * policy.factor;
  }
  return delays;
}

type SleepFn = (ms: number) => Promise<void>;

const realSleep: SleepFn = (ms) => new Promise((resolve) => setTimeout(resolve, ms));

export class UiSession {
  private state: SessionState = {
    project: null,
    activePageId: null,
    pendingTicket: null,
    lastTicket: null,
    graph: null,
    history: [],
    files: [],
    run: null,
    error: null,
  };
  private listeners: Array<(state: SessionState) => void> = [];

  constructor(
    public api: ApiClient,
    private polling: PollingPolicy = DEFAULT_POLLING,
    private sleep: SleepFn = realSleep,
  ) {}

  get snapshot(): Readonly<SessionState> {
    return this.state;
  }

  get promptInFlight(): boolean {
    return this.state.pendingTicket !== null;
  }

  get activePage(): PageDto | null {
    const { project, activePageId } = this.state;
    if (!project || !activePageId) return null;
    return project.pages.find((p) => p.id === activePageId) ?? null;
  }

  get headSeq(): number | null {
    const { graph } = this.state;
    if (!graph || !graph.head) return null;
    return graph.nodes.find((n) => n.id === graph.head)?.seq ?? null;
  }

  onChange(listener: (state: SessionState) => void): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener(this.state);
  }

  private update(patch: Partial<SessionState>): void {
    this.state = { ...this.state, ...patch };
    this.emit();
  }

  // -- project lifecycle ----------------------------------------------------

  async createProject(name: string, context: string, profile: string): Promise<ProjectDto> {
    const project = await this.guardApi(() => this.api.createProject(name, context, profile));
    this.update({ project, activePageId: null });
    await this.refresh();
    return project;
  }

  async openProject(projectId: string): Promise<void> {
    const project = await this.guardApi(() => this.api.getProject(projectId));
    this.update({ project, activePageId: project.pages[0]?.id ?? null });
    await this.refresh();
  }

  async addPage(name: string, description: string): Promise<PageDto> {
    const project = this.requireProject();
    const page = await this.guardApi(() => this.api.addPage(project.id, name, description));
    await this.reloadProject();
    this.update({ activePageId: page.id });
    return page;
  }

  selectPage(pageId: string): void {
    this.update({ activePageId: pageId });
  }

  // -- the prompt pipeline -----------------------------------------------------

  async submitPrompt(kind: PromptKind, text: string, targetPageId?: string): Promise<JobTicketDto> {
    if (this.promptInFlight) {
      throw new Error("a prompt is already in flight; wait for the current job");
    }
    const project = this.requireProject();
    const pageId = this.state.activePageId;
    if (!pageId) throw new Error("select a page first");

    // Claim the slot synchronously so a double-submit cannot race the POST.
    this.update({
      pendingTicket: { id: "", project_id: project.id, kind, state: "queued", result: null, error: null },
      error: null,
    });
    let ticket: JobTicketDto;
    try {
      ticket = await this.api.submitPrompt(project.id, pageId, kind, text, targetPageId);
    } catch (error) {
      this.update({ pendingTicket: null, error: describe(error) });
      throw error;
    }
    this.update({ pendingTicket: ticket });

    let delay = this.polling.initialMs;
    try {
      while (ticket.state === "queued" || ticket.state === "running") {
        await this.sleep(Math.min(delay, this.polling.maxMs));
        delay = delay * this.polling.factor;
        ticket = await this.api.getJob(ticket.id);
        this.update({ pendingTicket: ticket });
      }
    } finally {
      this.update({
        pendingTicket: null,
        lastTicket: ticket,
        error: ticket.state === "failed" ? (ticket.error ?? "job failed") : null,
      });
    }
    await this.refresh();
    return ticket;
  }

  // -- versioning -----------------------------------------------------------------

  async rollback(): Promise<void> {
    const project = this.requireProject();
    await this.guardApi(() => this.api.rollback(project.id));
    await this.refresh();
  }

  async checkout(snapshotId: string): Promise<void> {
    const project = this.requireProject();
    await this.guardApi(() => this.api.checkout(project.id, snapshotId));
    await this.refresh();
  }

  async applyFeature(featureId: string): Promise<void> {
    const project = this.requireProject();
    await this.guardApi(() => this.api.applyFeature(project.id, featureId));
    await this.refresh();
  }

  // -- run / preview -----------------------------------------------------------------

  async runApp(): Promise<RunHandleDto> {
    const project = this.requireProject();
    const handle = await this.guardApi(() => this.api.run(project.id));
    this.update({ run: handle });
    return handle;
  }

  async stopApp(): Promise<void> {
    const project = this.requireProject();
    const handle = await this.guardApi(() => this.api.stop(project.id));
    this.update({ run: handle });
  }

  async refreshRun(): Promise<void> {
    const project = this.requireProject();
    try {
      this.update({ run: await this.api.runStatus(project.id) });
    } catch (error) {
      if (error instanceof ApiError && error.status === 404) {
        this.update({ run: null });
        return;
      }
      throw error;
    }
  }

  // -- state refresh --------------------------------------------------------------------

  async refresh(): Promise<void> {
    await this.reloadProject();
    const project = this.requireProject();
    const [graph, history, files] = await Promise.all([
      this.api.getGraph(project.id),
      this.api.getHistory(project.id),
      this.api.getFiles(project.id),
    ]);
    this.update({ graph, history, files: files.paths });
  }

  private async reloadProject(): Promise<void> {
    const project = this.requireProject();
    this.update({ project: await this.api.getProject(project.id) });
  }

  private requireProject(): ProjectDto {
    if (!this.state.project) throw new Error("no project open");
    return this.state.project;
  }

  private async guardApi<T>(call: () => Promise<T>): Promise<T> {
    try {
      const result = await call();
      if (this.state.error) this.update({ error: null });
      return result;
    } catch (error) {
      this.update({ error: describe(error) });
      throw error;
    }
  }
}

function describe(error: unknown): string {
  if (error instanceof ApiError) return `${error.code}: ${error.message}`;
  return error instanceof Error ? error.message : String(error);
}
