// @vitest-environment jsdom
//
// End-to-end gate: spawn the real play server, drive a scripted three-turn
// game through the client session, and check that the score the UI displays
// at the end is exactly the server's gameover score. The client side here is
// the same code the browser runs; only the websocket object differs.
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, rmSync, writeFileSync } from "node:fs";
import { get as httpGet } from "node:http";
import { tmpdir } from "node:os";
import * as path from "node:path";

import WebSocket from "ws";

import { ClientSession } from "../src/session.js";
import { renderBoard, renderTrace } from "../src/render.js";
import { parseServerMsg, PASS, type Act } from "../src/protocol.js";

const PORT = 8800 + (process.pid % 150);
const BASE = `http://127.0.0.1:${PORT}`;

const SCENARIO = {
  name: "roundtrip",
  width: 5,
  height: 3,
  max_turns: 3,
  terrain: ["ccccc", "ccccc", "ccccc"],
  objectives: [{ q: 2, r: 1, value: 2 }],
  units: [
    { id: 1, faction: "blue", kind: "infantry", strength: 100, q: 0, r: 1 },
    { id: 2, faction: "red", kind: "infantry", strength: 60, q: 4, r: 1 },
  ],
  combat: { deterministic: true },
};

let tmp: string;
let server: ChildProcess;
let serverErr = "";

function health(): Promise<boolean> {
  return new Promise((resolve) => {
    const req = httpGet(`${BASE}/health`, (res) => {
      res.resume();
      resolve(res.statusCode === 200);
    });
    req.on("error", () => resolve(false));
  });
}

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 300; i++) {
    if (server.exitCode !== null) {
      throw new Error(`server exited early (code ${server.exitCode}): ${serverErr}`);
    }
    if (await health()) return;
    await new Promise((r) => setTimeout(r, 100));
  }
  throw new Error(`server never came up on ${BASE}: ${serverErr}`);
}

beforeAll(async () => {
  tmp = mkdtempSync(path.join(tmpdir(), "warhex-ui-"));
  const scenarioPath = path.join(tmp, "roundtrip.json");
  writeFileSync(scenarioPath, JSON.stringify(SCENARIO));
  server = spawn(
    "python3",
    [
      "-m",
      "warhex.cli",
      "serve",
      "--scenario",
      scenarioPath,
      "--red",
      "greedy",
      "--seed",
      "3",
      "--host",
      "127.0.0.1",
      "--port",
      String(PORT),
    ],
    { stdio: ["ignore", "ignore", "pipe"] },
  );
  server.stderr!.on("data", (chunk) => {
    serverErr += String(chunk);
  });
  await waitForServer();
});

afterAll(async () => {
  server.kill("SIGTERM");
  await new Promise((r) => server.once("exit", r));
  rmSync(tmp, { recursive: true, force: true });
});

/** Fixed script: lowest-direction attack, else lowest-direction move, else pass. */
function scriptedAct(legal: Act[]): Act {
  const ranked = [...legal].sort((a, b) => {
    const kindRank = (x: Act) => (x.kind === "attack" ? 0 : x.kind === "move" ? 1 : 2);
    if (kindRank(a) !== kindRank(b)) return kindRank(a) - kindRank(b);
    const dir = (x: Act) => (x.kind === "pass" ? 0 : x.dir);
    return dir(a) - dir(b);
  });
  return ranked[0] ?? PASS;
}

describe("ui round trip", () => {
  it("plays a scripted three-turn game and displays the server's final score", async () => {
    const ws = new WebSocket(`ws://127.0.0.1:${PORT}/play?scenario=roundtrip&seed=3`);
    const session = new ClientSession((msg) => ws.send(JSON.stringify(msg)));
    const sentLegal: boolean[] = [];

    const finished = new Promise<void>((resolve, reject) => {
      ws.on("message", (data) => {
        try {
          const msg = parseServerMsg(String(data));
          session.handle(msg);
          if (msg.type === "gameover") {
            resolve();
          } else if (session.prompt !== null) {
            const act = scriptedAct(session.legalActs());
            sentLegal.push(session.isLegal(act));
            expect(session.submit(act)).toBe(true);
          }
        } catch (err) {
          reject(err);
        }
      });
      ws.on("error", reject);
      setTimeout(() => reject(new Error("game never finished")), 45_000);
    });
    await finished;
    ws.close();

    // Only legal acts went out, and the server never complained.
    expect(sentLegal.length).toBeGreaterThan(0);
    expect(sentLegal.every(Boolean)).toBe(true);
    expect(session.errors).toEqual([]);

    // One blue and one red unit over three turns: six result frames, and the
    // last running score the server sent equals the gameover score.
    expect(session.rows).toHaveLength(6);
    expect(session.state!.turn).toBe(SCENARIO.max_turns - 1);
    expect(session.finalScore).not.toBeNull();
    expect(session.score).toBe(session.finalScore);

    // What the DOM shows after the last repaint is the server's number.
    const board = document.createElement("div");
    const trace = document.createElement("div");
    document.body.append(board, trace);
    renderBoard(board, session.scenario!, session.state, { score: session.score });
    renderTrace(trace, session.rows, session.finalScore);
    const header = board.querySelector(".status")!.textContent!;
    expect(header.endsWith(`score ${session.finalScore}`)).toBe(true);
    expect(trace.querySelector(".final-score")!.textContent).toBe(
      `Final score: ${session.finalScore}`,
    );
  });
});
