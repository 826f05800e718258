// DOM glue: mounts the rendered views and wires events to the session.

import { ApiClient } from "./api.js";
import { UiSession } from "./session.js";
import type { ProfileDto, ProjectDto, PromptKind } from "./types.js";
import { renderConnect, renderProject, renderSetup } from "./views.js";

const STORAGE_KEY = "pagewright-connection";

interface Connection {
  url: string;
  token: string | null;
}

export class App {
  private session: UiSession | null = null;
  private profiles: ProfileDto[] = [];
  private projects: ProjectDto[] = [];
  private lastError: string | null = null;

  constructor(private rootEl: HTMLElement) {}

  async start(): Promise<void> {
    const saved = localStorage.getItem(STORAGE_KEY);
    if (saved) {
      const connection = JSON.parse(saved) as Connection;
      if (await this.connect(connection.url, connection.token)) return;
    }
    this.showConnect();
  }

  private async connect(url: string, token: string | null): Promise<boolean> {
    try {
      const api = new ApiClient(url, token);
      await api.health();
      this.profiles = await api.listProfiles();
      this.projects = await api.listProjects();
      this.session = new UiSession(api);
      this.session.onChange(() => this.renderProjectView());
      localStorage.setItem(STORAGE_KEY, JSON.stringify({ url, token }));
      this.showSetup();
      return true;
    } catch (error) {
      this.lastError = error instanceof Error ? error.message : String(error);
      return false;
    }
  }

  // -- view mounting ---------------------------------------------------------

  private showConnect(): void {
    this.rootEl.innerHTML = renderConnect("http://127.0.0.1:8800", this.lastError);
    this.byId<HTMLFormElement>("connect-form").addEventListener("submit", async (event) => {
      event.preventDefault();
      const url = this.byId<HTMLInputElement>("connect-url").value.trim();
      const token = this.byId<HTMLInputElement>("connect-token").value.trim() || null;
      if (!(await this.connect(url, token))) this.showConnect();
    });
  }

  private showSetup(): void {
    this.rootEl.innerHTML = renderSetup(this.profiles, this.projects, this.lastError);
    this.lastError = null;
    this.byId<HTMLFormElement>("setup-form").addEventListener("submit", async (event) => {
      event.preventDefault();
      const name = this.byId<HTMLInputElement>("setup-name").value.trim();
      const context = this.byId<HTMLTextAreaElement>("setup-context").value.trim();
      const profile = this.byId<HTMLSelectElement>("setup-profile").value;
      try {
        await this.session!.createProject(name, context, profile);
      } catch (error) {
        this.lastError = describeError(error);
        this.showSetup();
      }
    });
    for (const link of Array.from(this.rootEl.querySelectorAll<HTMLAnchorElement>(".open-project"))) {
      link.addEventListener("click", async (event) => {
        event.preventDefault();
        await this.session!.openProject(link.dataset.projectId!);
      });
    }
  }

  private renderProjectView(): void {
    const session = this.session!;
    if (!session.snapshot.project) return;
    this.rootEl.innerHTML = renderProject(session.snapshot);
    this.wireProjectEvents();
  }

  private wireProjectEvents(): void {
    const session = this.session!;
    const swallow = (work: Promise<unknown>) => void work.catch(() => undefined);

    this.maybe("add-page-form")?.addEventListener("submit", (event) => {
      event.preventDefault();
      const name = this.byId<HTMLInputElement>("page-name").value.trim();
      const description = this.byId<HTMLTextAreaElement>("page-description").value.trim();
      if (name) swallow(session.addPage(name, description));
    });

    for (const link of Array.from(this.rootEl.querySelectorAll<HTMLAnchorElement>(".select-page"))) {
      link.addEventListener("click", (event) => {
        event.preventDefault();
        session.selectPage(link.dataset.pageId!);
      });
    }

    for (const button of Array.from(this.rootEl.querySelectorAll<HTMLButtonElement>(".apply-feature"))) {
      button.addEventListener("click", () => swallow(session.applyFeature(button.dataset.featureId!)));
    }

    this.maybe("generate-form")?.addEventListener("submit", (event) => {
      event.preventDefault();
      const page = session.activePage;
      if (page) swallow(session.submitPrompt("Initial", page.description));
    });

    this.maybe("prompt-form")?.addEventListener("submit", (event) => {
      event.preventDefault();
      if (session.promptInFlight) return; // double-submit impossible
      const kind = (
        this.rootEl.querySelector<HTMLInputElement>("input[name=kind]:checked")?.value ?? "Feature"
      ) as PromptKind;
      const text = this.byId<HTMLTextAreaElement>("prompt-text").value.trim();
      if (text) swallow(session.submitPrompt(kind, text));
    });

    this.maybe("transition-form")?.addEventListener("submit", (event) => {
      event.preventDefault();
      if (session.promptInFlight) return;
      const target = this.byId<HTMLSelectElement>("transition-target").value;
      const text = this.byId<HTMLInputElement>("transition-text").value.trim();
      if (target && text) swallow(session.submitPrompt("Transition", text, target));
    });

    this.maybe("rollback-button")?.addEventListener("click", () => swallow(session.rollback()));
    this.maybe("run-button")?.addEventListener("click", () => swallow(session.runApp()));
    this.maybe("stop-button")?.addEventListener("click", () => swallow(session.stopApp()));

    for (const node of Array.from(this.rootEl.querySelectorAll<SVGGElement>(".version-graph .node"))) {
      node.addEventListener("click", () => {
        const snapshotId = node.dataset.snapshotId!;
        if (confirm("Restore this version? Later versions stay available in the graph.")) {
          swallow(session.checkout(snapshotId));
        }
      });
    }
  }

  private byId<T extends HTMLElement>(id: string): T {
    return document.getElementById(id) as T;
  }

  private maybe(id: string): HTMLElement | null {
    return document.getElementById(id);
  }
}

function describeError(error: unknown): string {
  return error instanceof Error ? error.message : String(error);
}
