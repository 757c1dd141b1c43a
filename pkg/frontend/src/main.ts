// Browser entry point: wires a websocket to the session and the renderers.
// All game logic lives server-side; this file is plumbing and event wiring.

import { ClientSession } from "./session.js";
import { renderBoard, renderTrace } from "./render.js";
import { parseServerMsg, PASS } from "./protocol.js";
import type { Axial } from "./hex.js";
import { neighbor } from "./hex.js";

function mustGet(id: string): HTMLElement {
  const node = document.getElementById(id);
  if (node === null) throw new Error(`missing #${id}`);
  return node;
}

const boardDiv = mustGet("board");
const traceDiv = mustGet("trace");
const errorDiv = mustGet("errors");
const passBtn = mustGet("pass") as HTMLButtonElement;
const connectBtn = mustGet("connect") as HTMLButtonElement;
const scenarioSel = mustGet("scenario") as HTMLSelectElement;
const seedInput = mustGet("seed") as HTMLInputElement;

const params = new URLSearchParams(location.search);
const server = params.get("server") ?? location.host;

let session: ClientSession | null = null;
let socket: WebSocket | null = null;

function repaint(): void {
  if (session === null || session.scenario === null) return;
  const s = session;
  const legal: Axial[] = [];
  const mover = s.promptedUnit();
  if (mover !== null) {
    for (let dir = 0; dir < 6; dir++) {
      for (const kind of ["move", "attack"] as const) {
        if (s.isLegal({ kind, dir })) {
          const target = neighbor({ q: mover.q, r: mover.r }, dir);
          if (!legal.some((c) => c.q === target.q && c.r === target.r)) legal.push(target);
        }
      }
    }
  }
  renderBoard(boardDiv, s.scenario!, s.state, {
    promptedUnit: s.prompt?.unit ?? null,
    legalCells: legal,
    score: s.score,
    onCellClick: (cell) => {
      const act = s.actForCell(cell);
      if (act !== null) {
        s.submit(act);
        repaint();
      }
    },
  });
  renderTrace(traceDiv, s.rows, s.finalScore);
  passBtn.disabled = !s.isLegal(PASS);
  errorDiv.textContent = s.errors.length ? s.errors[s.errors.length - 1]! : "";
}

function connect(): void {
  socket?.close();
  const scenario = encodeURIComponent(scenarioSel.value);
  const seed = encodeURIComponent(seedInput.value || "0");
  socket = new WebSocket(`ws://${server}/play?scenario=${scenario}&seed=${seed}`);
  session = new ClientSession((msg) => socket!.send(JSON.stringify(msg)));
  socket.onmessage = (ev) => {
    session!.handle(parseServerMsg(String(ev.data)));
    repaint();
  };
  socket.onclose = () => repaint();
}

passBtn.addEventListener("click", () => {
  if (session !== null && session.submit(PASS)) repaint();
});
connectBtn.addEventListener("click", connect);

async function loadScenarios(): Promise<void> {
  const res = await fetch(`http://${server}/scenarios`);
  const doc = (await res.json()) as { scenarios: Array<{ name: string }> };
  scenarioSel.replaceChildren();
  for (const s of doc.scenarios) {
    const opt = document.createElement("option");
    opt.value = s.name;
    opt.textContent = s.name;
    scenarioSel.appendChild(opt);
  }
}

loadScenarios().catch((err) => {
  errorDiv.textContent = `failed to list scenarios: ${err}`;
});
