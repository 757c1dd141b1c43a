// Client-side game session: tracks the latest server state, the pending
// prompt, and enforces that only acts from the prompt's legal list ever go
// out. The displayed score is always the last server-sent score; the client
// never recomputes it.

import type {
  Act,
  ActMsg,
  PromptMsg,
  ScenarioDoc,
  ServerMsg,
  StateMsg,
  UnitView,
} from "./protocol.js";
import { actMsg, sameAct } from "./protocol.js";
import type { Axial } from "./hex.js";
import { directionBetween } from "./hex.js";

export interface TraceRow {
  reward: number;
  score: number;
  events: number;
}

export class ClientSession {
  scenario: ScenarioDoc | null = null;
  state: StateMsg | null = null;
  prompt: PromptMsg | null = null;
  score = 0;
  finalScore: number | null = null;
  rows: TraceRow[] = [];
  errors: string[] = [];

  private readonly send: (msg: ActMsg) => void;

  constructor(send: (msg: ActMsg) => void) {
    this.send = send;
  }

  get over(): boolean {
    return this.finalScore !== null;
  }

  handle(msg: ServerMsg): void {
    switch (msg.type) {
      case "hello":
        this.scenario = msg.scenario;
        break;
      case "state":
        this.state = msg;
        this.score = msg.score;
        break;
      case "prompt":
        this.prompt = msg;
        break;
      case "result":
        this.score = msg.score;
        this.rows.push({ reward: msg.reward, score: msg.score, events: msg.events.length });
        break;
      case "error":
        this.errors.push(`${msg.code}: ${msg.msg}`);
        break;
      case "gameover":
        this.finalScore = msg.final_score;
        this.prompt = null;
        break;
    }
  }

  /** Acts the pending prompt allows; empty while no prompt is pending. */
  legalActs(): Act[] {
    return this.prompt === null ? [] : this.prompt.legal;
  }

  isLegal(act: Act): boolean {
    return this.legalActs().some((a) => sameAct(a, act));
  }

  promptedUnit(): UnitView | null {
    if (this.prompt === null || this.state === null) return null;
    return this.state.units.find((u) => u.id === this.prompt!.unit) ?? null;
  }

  private unitAt(cell: Axial): UnitView | null {
    if (this.state === null) return null;
    return this.state.units.find((u) => u.q === cell.q && u.r === cell.r) ?? null;
  }

  /**
   * Map a clicked cell to an act: adjacent enemy resolves to attack, an
   * adjacent free cell to move, anything else (or any illegal act) to null.
   */
  actForCell(cell: Axial): Act | null {
    const mover = this.promptedUnit();
    if (mover === null) return null;
    const dir = directionBetween({ q: mover.q, r: mover.r }, cell);
    if (dir === null) return null;
    const occupant = this.unitAt(cell);
    const act: Act =
      occupant !== null && occupant.faction !== mover.faction
        ? { kind: "attack", dir }
        : { kind: "move", dir };
    return this.isLegal(act) ? act : null;
  }

  /**
   * Emit an act if and only if a prompt is pending and the act is listed
   * legal. Clears the prompt on send, so a second click is a no-op until
   * the server prompts again.
   */
  submit(act: Act): boolean {
    if (this.prompt === null || !this.isLegal(act)) return false;
    const unit = this.prompt.unit;
    this.prompt = null;
    this.send(actMsg(unit, act));
    return true;
  }
}
