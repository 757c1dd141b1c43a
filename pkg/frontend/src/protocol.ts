// Wire types for the play server protocol. One JSON document per websocket
// frame; the server drives the conversation and the client only ever sends
// act messages in reply to a prompt.

export type Faction = "blue" | "red";

export type Act =
  | { kind: "pass" }
  | { kind: "move"; dir: number }
  | { kind: "attack"; dir: number };

export interface UnitView {
  id: number;
  faction: Faction;
  kind: string;
  strength: number;
  q: number;
  r: number;
  acted: boolean;
}

export interface ObjectiveView {
  q: number;
  r: number;
  value: number;
}

export interface ScenarioDoc {
  name?: string;
  width: number;
  height: number;
  max_turns: number;
  terrain: string[];
  objectives: ObjectiveView[];
  units: unknown[];
  combat?: Record<string, unknown>;
}

export interface HelloMsg {
  type: "hello";
  v: number;
  scenario: ScenarioDoc;
}

export interface StateMsg {
  type: "state";
  turn: number;
  phase: Faction;
  score: number;
  units: UnitView[];
  objectives: ObjectiveView[];
  terrain_digest: string;
}

export interface PromptMsg {
  type: "prompt";
  unit: number;
  legal: Act[];
}

export interface ResultMsg {
  type: "result";
  events: unknown[];
  reward: number;
  score: number;
}

export interface ErrorMsg {
  type: "error";
  code: string;
  msg: string;
}

export interface GameoverMsg {
  type: "gameover";
  final_score: number;
}

export type ServerMsg =
  | HelloMsg
  | StateMsg
  | PromptMsg
  | ResultMsg
  | ErrorMsg
  | GameoverMsg;

export interface ActMsg {
  type: "act";
  unit: number;
  action: Act;
}

const MSG_TYPES = new Set(["hello", "state", "prompt", "result", "error", "gameover"]);

export function parseServerMsg(raw: string): ServerMsg {
  let doc: unknown;
  try {
    doc = JSON.parse(raw);
  } catch {
    throw new Error(`unparsable frame: ${raw.slice(0, 80)}`);
  }
  if (typeof doc !== "object" || doc === null) {
    throw new Error("frame is not an object");
  }
  const type = (doc as { type?: unknown }).type;
  if (typeof type !== "string" || !MSG_TYPES.has(type)) {
    throw new Error(`unknown message type: ${String(type)}`);
  }
  return doc as ServerMsg;
}

export function sameAct(a: Act, b: Act): boolean {
  if (a.kind !== b.kind) return false;
  if (a.kind === "pass") return true;
  return a.dir === (b as { dir: number }).dir;
}

export function actMsg(unit: number, action: Act): ActMsg {
  return { type: "act", unit, action };
}

export const PASS: Act = { kind: "pass" };
