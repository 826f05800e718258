// HTML renderers. Pure functions from state to markup strings; app.ts owns
// mounting and event wiring. Keeping these DOM-free makes them directly
// assertable in tests.

import { renderGraphSvg } from "./graph.js";
import type { SessionState } from "./session.js";
import type { HistoryEntryDto, ProfileDto, ProjectDto } from "./types.js";

export function esc(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderConnect(apiUrl: string, error: string | null): string {
  return `
<section class="connect">
  <h1>Connect to your builder service</h1>
  ${error ? `<p class="error">${esc(error)}</p>` : ""}
  <form id="connect-form">
    <label>Service URL <input id="connect-url" value="${esc(apiUrl)}" placeholder="http://127.0.0.1:8800" /></label>
    <label>Operator token (if configured) <input id="connect-token" type="password" /></label>
    <button type="submit">Connect</button>
  </form>
</section>`;
}

export function renderSetup(profiles: ProfileDto[], projects: ProjectDto[], error: string | null): string {
  const options = profiles
    .map((p) => `<option value="${esc(p.id)}">${esc(p.display_name)}</option>`)
    .join("");
  const existing = projects.length
    ? `<h2>Open an existing project</h2><ul class="project-list">` +
      projects
        .map(
          (p) =>
            `<li><a href="#" class="open-project" data-project-id="${esc(p.id)}">${esc(p.name)}</a>` +
            ` <small>${p.pages.length} page(s)</small></li>`,
        )
        .join("") +
      `</ul>`
    : "";
  return `
<section class="setup">
  <h1>Start a new application</h1>
  ${error ? `<p class="error">${esc(error)}</p>` : ""}
  <form id="setup-form">
    <label>Name <input id="setup-name" required placeholder="ForumApp" /></label>
    <label>What is this system about?
      <textarea id="setup-context" rows="3" placeholder="a simple question and answer forum"></textarea>
    </label>
    <label>Stack <select id="setup-profile">${options}</select></label>
    <button type="submit">Create project</button>
  </form>
  ${existing}
</section>`;
}

function renderTranscript(
  history: HistoryEntryDto[],
  pageId: string | null,
  abandonedRequestIds: Set<number>,
): string {
  const entries = history.filter((e) => pageId === null || e.request.page_id === pageId);
  if (!entries.length) {
    return `<p class="empty">No prompts yet. Describe what this page should do.</p>`;
  }
  return entries
    .map((entry) => {
      const userText = entry.request.messages[entry.request.messages.length - 1]?.text ?? "";
      const narrative = entry.response?.text ?? "(no response)";
      const abandoned = abandonedRequestIds.has(entry.request.id);
      const marker = abandoned
        ? `<span class="abandoned-marker">rolled back; not part of the current version</span>`
        : "";
      return (
        `<div class="exchange${abandoned ? " abandoned" : ""}">` +
        `<div class="bubble user"><span class="kind">${esc(entry.request.kind)}</span>${esc(userText)}</div>` +
        `<div class="bubble assistant">${marker}${esc(extractNarrative(narrative))}</div>` +
        `</div>`
      );
    })
    .join("");
}

// Requests whose snapshots were bypassed by rollback/checkout.
export function abandonedRequestIds(state: SessionState): Set<number> {
  const graph = state.graph;
  if (!graph) return new Set();
  const onPath = new Set(graph.active_path);
  const ids = new Set<number>();
  for (const node of graph.nodes) {
    if (!onPath.has(node.id) && node.prompt_record_id !== null) {
      ids.add(node.prompt_record_id);
    }
  }
  return ids;
}

// Transcript shows the narrative, never raw file blocks.
function extractNarrative(responseText: string): string {
  const lines = responseText.split("\n");
  const kept: string[] = [];
  let inFence = false;
  let skippingBlock = false;
  for (const line of lines) {
    if (/^`{3,}/.test(line)) {
      inFence = !inFence;
      if (!inFence) skippingBlock = false;
      continue;
    }
    if (!inFence && line.startsWith("### FILE:")) {
      skippingBlock = true;
      kept.push(`[updated ${line.slice("### FILE:".length).trim()}]`);
      continue;
    }
    if (!inFence && !skippingBlock && line.trim()) kept.push(line);
    if (inFence && skippingBlock) continue;
  }
  return kept.join("\n").trim() || "(files updated)";
}

export function renderProject(state: SessionState): string {
  const project = state.project;
  if (!project) return `<section><p>No project open.</p></section>`;
  const pending = state.pendingTicket !== null;
  const disabled = pending ? "disabled" : "";
  const activePage = project.pages.find((p) => p.id === state.activePageId) ?? null;

  const pagesNav = project.pages
    .map((p) => {
      const current = p.id === state.activePageId ? " current" : "";
      return (
        `<li><a href="#" class="select-page${current}" data-page-id="${esc(p.id)}">` +
        `${esc(p.name)} <span class="status ${p.status}">${p.status}</span></a></li>`
      );
    })
    .join("");

  const features = project.predefined_features
    .map(
      (f) =>
        `<button class="apply-feature" data-feature-id="${esc(f.id)}" ${disabled}>` +
        `Add ${esc(f.id.replace(/_/g, " "))}</button>`,
    )
    .join(" ");

  const transitionTargets = project.pages
    .filter((p) => p.id !== state.activePageId && p.status === "generated")
    .map((p) => `<option value="${esc(p.id)}">${esc(p.name)}</option>`)
    .join("");

  const headSeq = state.graph?.nodes.find((n) => n.id === state.graph?.head)?.seq;
  const versionBadge =
    headSeq === undefined ? "" : `<span id="version-badge" class="badge">version ${headSeq}</span>`;

  const jobBanner = pending
    ? `<p class="job-state">Working on it… job ${esc(state.pendingTicket?.id ?? "")} is ${esc(
        state.pendingTicket?.state ?? "queued",
      )}. Input is disabled until it finishes.</p>`
    : "";
  const errorBanner = state.error ? `<p class="error">${esc(state.error)}</p>` : "";

  const refinement = activePage
    ? activePage.status === "generated"
      ? `
    <form id="prompt-form">
      <fieldset ${disabled}>
        <legend>Refine "${esc(activePage.name)}"</legend>
        <label><input type="radio" name="kind" value="Feature" checked /> new feature</label>
        <label><input type="radio" name="kind" value="BugFix" /> bug fix</label>
        <label><input type="radio" name="kind" value="Layout" /> layout</label>
        <textarea id="prompt-text" rows="3" ${disabled} placeholder="Describe the change in plain words"></textarea>
        <button id="prompt-submit" type="submit" ${disabled}>Send</button>
      </fieldset>
    </form>
    <form id="transition-form">
      <fieldset ${disabled} ${transitionTargets ? "" : "hidden"}>
        <legend>Connect to another page</legend>
        <select id="transition-target">${transitionTargets}</select>
        <input id="transition-text" placeholder="e.g. Add a button to open that page" ${disabled} />
        <button id="transition-submit" type="submit" ${disabled}>Connect pages</button>
      </fieldset>
    </form>`
      : `
    <form id="generate-form">
      <fieldset ${disabled}>
        <legend>"${esc(activePage.name)}" is not generated yet</legend>
        <p>${esc(activePage.description)}</p>
        <button id="generate-submit" type="submit" ${disabled}>Generate this page</button>
      </fieldset>
    </form>`
    : `<p class="empty">Add a page to begin.</p>`;

  return `
<section class="project">
  <header>
    <h1>${esc(project.name)}</h1>
    ${versionBadge}
    <button id="rollback-button" ${disabled} title="Restore the previous version">&#8630; Roll back</button>
  </header>
  ${errorBanner}
  ${jobBanner}
  <div class="columns">
    <aside>
      <h2>Pages</h2>
      <ul class="pages">${pagesNav}</ul>
      <form id="add-page-form">
        <input id="page-name" placeholder="Page name" ${disabled} />
        <textarea id="page-description" rows="2" placeholder="What should this page do?" ${disabled}></textarea>
        <button type="submit" ${disabled}>Add page</button>
      </form>
      <h2>Built-in features</h2>
      ${features}
    </aside>
    <main>
      <div class="transcript" id="transcript">${renderTranscript(
        state.history,
        state.activePageId,
        abandonedRequestIds(state),
      )}</div>
      ${refinement}
    </main>
  </div>
  ${renderPreview(state)}
  <section class="graph-panel">
    <h2>Versions</h2>
    <p class="hint">Solid row: current path. Dashed nodes: abandoned by rollback. Click a node to restore it.</p>
    ${state.graph ? renderGraphSvg(state.graph) : ""}
  </section>
  <details class="files"><summary>Files at this version (${state.files.length})</summary>
    <ul>${state.files.map((f) => `<li>${esc(f)}</li>`).join("")}</ul>
  </details>
</section>`;
}

export function renderPreview(state: SessionState): string {
  const run = state.run;
  const running = run?.state === "running" || run?.state === "starting";
  const failed = run?.state === "failed";
  return `
<section class="preview-panel">
  <h2>Preview</h2>
  <button id="run-button" ${running ? "disabled" : ""}>Run app</button>
  <button id="stop-button" ${running ? "" : "disabled"}>Stop</button>
  ${run ? `<span class="run-state ${run.state}">${run.state}</span>` : ""}
  ${
    running
      ? `<p><a href="${esc(run!.preview_url)}" target="_blank">${esc(run!.preview_url)}</a></p>
         <iframe id="preview-frame" src="${esc(run!.preview_url)}" title="app preview"></iframe>`
      : ""
  }
  ${
    failed
      ? `<details open class="log-tail"><summary>The app failed to run; log tail</summary>
         <pre>${esc((run!.log_tail ?? []).join("\n"))}</pre></details>`
      : ""
  }
</section>`;
}
