// UI flow against the live mock-backed service spawned by globalSetup:
// create project -> add page -> generate -> refine -> rollback -> run preview.
//
// Prompt texts must stay in sync with the bundled uiflow session script,
// because mock fixtures are keyed on the exact composed request.

import { readFileSync } from "node:fs";
import path from "node:path";
import { fileURLToPath } from "node:url";

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { UiSession } from "../src/session.js";

const here = path.dirname(fileURLToPath(import.meta.url));

function serviceUrl(): string {
  const info = JSON.parse(readFileSync(path.join(here, ".service.json"), "utf-8"));
  return info.url as string;
}

const CONTEXT = "a tiny notes application used by the interface tests";
const PAGE_NAME = "Notes";
const PAGE_DESCRIPTION = "A page where I can write short notes and see them in a list.";
const FEATURE_TEXT = "add a control that removes every note at once";

function fastSession(api: ApiClient): UiSession {
  return new UiSession(api, { initialMs: 25, maxMs: 200, factor: 1.5 });
}

describe("UI flow against the mock-backed service", () => {
  it("builds, refines, rolls back, and previews a project", async () => {
    const api = new ApiClient(serviceUrl());
    const session = fastSession(api);

    const project = await session.createProject("FlowApp", CONTEXT, "testprofile");
    expect(project.head_snapshot).toBeTruthy();
    expect(session.snapshot.graph?.active_path.length).toBe(1);

    await session.addPage(PAGE_NAME, PAGE_DESCRIPTION);
    expect(session.activePage?.status).toBe("pending");

    // Generate the page (Initial submits the stored description).
    const initial = await session.submitPrompt("Initial", PAGE_DESCRIPTION);
    expect(initial.state).toBe("done");
    expect(session.activePage?.status).toBe("generated");
    expect(session.snapshot.files).toContain("client/pages/notes.html");
    expect(session.headSeq).toBe(1);

    // Refine it; while the job runs, a second submit must be impossible.
    const refinement = session.submitPrompt("Feature", FEATURE_TEXT);
    expect(session.promptInFlight).toBe(true);
    await expect(session.submitPrompt("Feature", "anything else")).rejects.toThrow(
      /already in flight/,
    );
    const ticket = await refinement;
    expect(ticket.state).toBe("done");
    expect(session.headSeq).toBe(2);
    const headBefore = session.snapshot.graph!.head!;
    const parentOfHead = session.snapshot.graph!.nodes.find((n) => n.id === headBefore)!.parent;

    // Rollback: displayed version returns to the parent, graph shows one
    // abandoned branch holding the refinement.
    await session.rollback();
    expect(session.snapshot.graph!.head).toBe(parentOfHead);
    expect(session.headSeq).toBe(1);
    expect(session.snapshot.graph!.abandoned_branches.length).toBe(1);
    expect(session.snapshot.graph!.abandoned_branches[0]).toEqual([headBefore]);
    expect(session.snapshot.history.length).toBe(2); // transcript keeps the abandoned exchange

    // Run and check the preview actually serves.
    const handle = await session.runApp();
    try {
      expect(handle.state).toBe("running");
      const preview = await fetch(handle.preview_url);
      expect(preview.status).toBe(200);
      const body = await preview.text();
      expect(body).toContain("Your app is running");
    } finally {
      await session.stopApp();
    }
    expect(session.snapshot.run?.state).toBe("stopped");
  });

  it("reports duplicate project names inline-style via the error state", async () => {
    const api = new ApiClient(serviceUrl());
    const session = fastSession(api);
    await expect(session.createProject("FlowApp", CONTEXT, "testprofile")).rejects.toThrow();
    expect(session.snapshot.error).toContain("conflict");
  });
});
