// DOM rendering: an SVG hex map plus a status header and a trace panel.
// Everything displayed comes straight from server messages; in particular
// the score line shows the last server-sent score, never a local recount.

import type { Axial } from "./hex.js";
import { axialToPixel, hexCorners } from "./hex.js";
import type { ScenarioDoc, StateMsg } from "./protocol.js";
import type { TraceRow } from "./session.js";

const SVG_NS = "http://www.w3.org/2000/svg";

export interface RenderOptions {
  size?: number;
  promptedUnit?: number | null;
  legalCells?: Axial[];
  onCellClick?: (cell: Axial) => void;
  /** Last server-sent score; falls back to the state message's score. */
  score?: number;
}

const TERRAIN_CLASS: Record<string, string> = {
  c: "terrain-clear",
  r: "terrain-rough",
  u: "terrain-urban",
  w: "terrain-water",
};

function el(doc: Document, name: string, attrs: Record<string, string>): SVGElement {
  const node = doc.createElementNS(SVG_NS, name) as SVGElement;
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, v);
  return node;
}

function banner(container: HTMLElement, text: string): void {
  const div = container.ownerDocument.createElement("div");
  div.className = "error-banner";
  div.textContent = text;
  container.appendChild(div);
}

/** Redraw the whole board into `container`. Cheap at desk-scale sizes. */
export function renderBoard(
  container: HTMLElement,
  scenario: ScenarioDoc,
  state: StateMsg | null,
  opts: RenderOptions = {},
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  if (
    !scenario ||
    !Array.isArray(scenario.terrain) ||
    scenario.terrain.length !== scenario.height
  ) {
    banner(container, "malformed scenario message");
    return;
  }

  const size = opts.size ?? 22;
  const header = doc.createElement("div");
  header.className = "status";
  if (state !== null) {
    header.textContent =
      `turn ${state.turn + 1}/${scenario.max_turns} · ` +
      `${state.phase} phase · score ${opts.score ?? state.score}`;
  } else {
    header.textContent = scenario.name ?? "awaiting state";
  }
  container.appendChild(header);

  // Corners reach size beyond centers; pad the viewBox accordingly.
  const maxPix = axialToPixel({ q: scenario.width - 1, r: scenario.height - 1 }, size);
  const svg = el(doc, "svg", {
    class: "board",
    viewBox: `${-size} ${-size} ${maxPix.x + 2 * size} ${maxPix.y + 2 * size}`,
  });
  container.appendChild(svg);

  const legal = new Set((opts.legalCells ?? []).map((c) => `${c.q},${c.r}`));
  for (let r = 0; r < scenario.height; r++) {
    const row = scenario.terrain[r]!;
    for (let q = 0; q < scenario.width; q++) {
      const { x, y } = axialToPixel({ q, r }, size);
      const points = hexCorners(x, y, size)
        .map((p) => `${p.x.toFixed(2)},${p.y.toFixed(2)}`)
        .join(" ");
      const classes = ["hex", TERRAIN_CLASS[row[q] ?? "c"] ?? "terrain-clear"];
      if (legal.has(`${q},${r}`)) classes.push("legal-target");
      const poly = el(doc, "polygon", {
        points,
        class: classes.join(" "),
        "data-q": String(q),
        "data-r": String(r),
      });
      if (opts.onCellClick) {
        poly.addEventListener("click", () => opts.onCellClick!({ q, r }));
      }
      svg.appendChild(poly);
    }
  }

  const objectives = state !== null ? state.objectives : scenario.objectives;
  for (const obj of objectives) {
    const { x, y } = axialToPixel({ q: obj.q, r: obj.r }, size);
    const mark = el(doc, "text", {
      x: String(x),
      y: String(y + size * 0.72),
      class: "objective",
      "text-anchor": "middle",
      "data-q": String(obj.q),
      "data-r": String(obj.r),
    });
    mark.textContent = `*${obj.value}`;
    svg.appendChild(mark);
  }

  if (state !== null) {
    for (const unit of state.units) {
      const { x, y } = axialToPixel({ q: unit.q, r: unit.r }, size);
      const classes = ["unit", unit.faction];
      if (unit.id === opts.promptedUnit) classes.push("prompted");
      if (unit.acted) classes.push("acted");
      const g = el(doc, "g", { class: classes.join(" "), "data-unit-id": String(unit.id) });
      g.appendChild(
        el(doc, "circle", { cx: String(x), cy: String(y), r: String(size * 0.55) }),
      );
      const label = el(doc, "text", {
        x: String(x),
        y: String(y + size * 0.18),
        class: "unit-label",
        "text-anchor": "middle",
      });
      label.textContent = String(unit.strength);
      g.appendChild(label);
      svg.appendChild(g);
    }
  }
}

/** Append-only decision log plus the final score once the game ends. */
export function renderTrace(
  container: HTMLElement,
  rows: TraceRow[],
  finalScore: number | null,
): void {
  const doc = container.ownerDocument;
  container.replaceChildren();
  const list = doc.createElement("ul");
  list.className = "trace";
  for (const row of rows) {
    const item = doc.createElement("li");
    const sign = row.reward >= 0 ? "+" : "";
    item.textContent = `reward ${sign}${row.reward} · score ${row.score}`;
    list.appendChild(item);
  }
  container.appendChild(list);
  if (finalScore !== null) {
    const final = doc.createElement("div");
    final.className = "final-score";
    final.textContent = `Final score: ${finalScore}`;
    container.appendChild(final);
  }
}
