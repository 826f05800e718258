// Version-graph layout and SVG rendering.
//
// The active path runs along lane 0; each abandoned branch gets its own
// lane below it, anchored at the depth where it forked. Nodes carry
// data-snapshot-id so the app can offer checkout on click.

import type { GraphDto, SnapshotNodeDto } from "./types.js";

export interface PlacedNode {
  node: SnapshotNodeDto;
  x: number; // depth from root
  y: number; // lane
  abandoned: boolean;
  isHead: boolean;
}

export function layoutGraph(graph: GraphDto): PlacedNode[] {
  const byId = new Map(graph.nodes.map((n) => [n.id, n]));
  const depth = new Map<string, number>();
  const resolveDepth = (id: string): number => {
    const known = depth.get(id);
    if (known !== undefined) return known;
    const node = byId.get(id);
    if (!node) return 0;
    const d = node.parent === null ? 0 : resolveDepth(node.parent) + 1;
    depth.set(id, d);
    return d;
  };

  const placed: PlacedNode[] = [];
  const onPath = new Set(graph.active_path);
  for (const id of graph.active_path) {
    const node = byId.get(id);
    if (!node) continue;
    placed.push({ node, x: resolveDepth(id), y: 0, abandoned: false, isHead: id === graph.head });
  }
  graph.abandoned_branches.forEach((branch, laneIndex) => {
    for (const id of branch) {
      const node = byId.get(id);
      if (!node) continue;
      placed.push({
        node,
        x: resolveDepth(id),
        y: laneIndex + 1,
        abandoned: !onPath.has(id),
        isHead: id === graph.head,
      });
    }
  });
  return placed;
}

const CELL_W = 72;
const CELL_H = 56;
const RADIUS = 11;

function cx(x: number): number {
  return 40 + x * CELL_W;
}

function cy(y: number): number {
  return 32 + y * CELL_H;
}

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/"/g, "&quot;");
}

export function renderGraphSvg(graph: GraphDto): string {
  const placed = layoutGraph(graph);
  if (placed.length === 0) {
    return `<svg class="version-graph" width="200" height="60"></svg>`;
  }
  const pos = new Map(placed.map((p) => [p.node.id, p]));
  const width = cx(Math.max(...placed.map((p) => p.x))) + 60;
  const height = cy(Math.max(...placed.map((p) => p.y))) + 44;

  const edges: string[] = [];
  for (const p of placed) {
    if (p.node.parent === null) continue;
    const parent = pos.get(p.node.parent);
    if (!parent) continue;
    const cls = p.abandoned ? "edge abandoned" : "edge active";
    edges.push(
      `<line class="${cls}" x1="${cx(parent.x)}" y1="${cy(parent.y)}" x2="${cx(p.x)}" y2="${cy(p.y)}" />`,
    );
  }

  const nodes = placed.map((p) => {
    const classes = ["node", p.abandoned ? "abandoned" : "active"];
    if (p.isHead) classes.push("head");
    const label = p.node.label ?? p.node.id.slice(0, 6);
    const title = `${label} (${p.node.tree_digest.slice(0, 8)})`;
    return (
      `<g class="${classes.join(" ")}" data-snapshot-id="${esc(p.node.id)}">` +
      `<circle cx="${cx(p.x)}" cy="${cy(p.y)}" r="${RADIUS}"><title>${esc(title)}</title></circle>` +
      `<text x="${cx(p.x)}" y="${cy(p.y) + RADIUS + 14}" text-anchor="middle">${esc(label)}</text>` +
      `</g>`
    );
  });

  return (
    `<svg class="version-graph" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">` +
    edges.join("") +
    nodes.join("") +
    `</svg>`
  );
}
