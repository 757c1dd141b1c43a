// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import { renderBoard, renderTrace } from "../src/render.js";
import type { ScenarioDoc, StateMsg } from "../src/protocol.js";

function scenario5x5(): ScenarioDoc {
  return {
    name: "open",
    width: 5,
    height: 5,
    max_turns: 10,
    terrain: ["ccccc", "ccccc", "ccrcc", "ccccc", "ccccw"],
    objectives: [{ q: 2, r: 2, value: 2 }],
    units: [],
  };
}

const FIXTURE_STATE: StateMsg = {
  type: "state",
  turn: 0,
  phase: "blue",
  score: 7,
  units: [
    { id: 1, faction: "blue", kind: "infantry", strength: 100, q: 0, r: 2, acted: false },
    { id: 4, faction: "red", kind: "armor", strength: 35, q: 4, r: 2, acted: true },
  ],
  objectives: [{ q: 2, r: 2, value: 2 }],
  terrain_digest: "0000000000000000",
};

function mount(): HTMLElement {
  const div = document.createElement("div");
  document.body.appendChild(div);
  return div;
}

describe("board rendering", () => {
  it("draws one hex per cell on an empty map", () => {
    const div = mount();
    renderBoard(div, scenario5x5(), null);
    expect(div.querySelectorAll("polygon.hex")).toHaveLength(25);
    expect(div.querySelectorAll("g.unit")).toHaveLength(0);
    expect(div.querySelector(".status")!.textContent).toBe("open");
  });

  it("classes terrain from the row strings", () => {
    const div = mount();
    renderBoard(div, scenario5x5(), null);
    const rough = div.querySelector('polygon[data-q="2"][data-r="2"]')!;
    const water = div.querySelector('polygon[data-q="4"][data-r="4"]')!;
    expect(rough.getAttribute("class")).toContain("terrain-rough");
    expect(water.getAttribute("class")).toContain("terrain-water");
  });

  it("labels units with strength and faction, objectives with value", () => {
    const div = mount();
    renderBoard(div, scenario5x5(), FIXTURE_STATE);
    const blue = div.querySelector('g[data-unit-id="1"]')!;
    expect(blue.getAttribute("class")).toContain("blue");
    expect(blue.querySelector("text.unit-label")!.textContent).toBe("100");
    const red = div.querySelector('g[data-unit-id="4"]')!;
    expect(red.getAttribute("class")).toContain("acted");
    expect(red.querySelector("text.unit-label")!.textContent).toBe("35");
    const marks = div.querySelectorAll("text.objective");
    expect(marks).toHaveLength(1);
    expect(marks[0]!.textContent).toBe("*2");
    expect(marks[0]!.getAttribute("data-q")).toBe("2");
  });

  it("shows the server score in the header, preferring the explicit one", () => {
    const div = mount();
    renderBoard(div, scenario5x5(), FIXTURE_STATE);
    expect(div.querySelector(".status")!.textContent).toBe(
      "turn 1/10 · blue phase · score 7",
    );
    renderBoard(div, scenario5x5(), FIXTURE_STATE, { score: 29 });
    expect(div.querySelector(".status")!.textContent).toBe(
      "turn 1/10 · blue phase · score 29",
    );
  });

  it("marks the prompted unit and the clickable cells", () => {
    const div = mount();
    const clicks: Array<{ q: number; r: number }> = [];
    renderBoard(div, scenario5x5(), FIXTURE_STATE, {
      promptedUnit: 1,
      legalCells: [{ q: 1, r: 2 }],
      onCellClick: (cell) => clicks.push(cell),
    });
    expect(div.querySelector('g[data-unit-id="1"]')!.getAttribute("class")).toContain(
      "prompted",
    );
    const target = div.querySelector("polygon.legal-target")!;
    expect(target.getAttribute("data-q")).toBe("1");
    (target as unknown as HTMLElement).dispatchEvent(new MouseEvent("click"));
    expect(clicks).toEqual([{ q: 1, r: 2 }]);
  });

  it("renders an error banner on a malformed scenario", () => {
    const div = mount();
    const broken = { ...scenario5x5(), terrain: ["ccccc"] };
    renderBoard(div, broken, null);
    expect(div.querySelector(".error-banner")).not.toBeNull();
    expect(div.querySelectorAll("polygon.hex")).toHaveLength(0);
  });
});

describe("trace panel", () => {
  it("appends one row per result and the final score at gameover", () => {
    const div = mount();
    renderTrace(div, [{ reward: 38, score: 38, events: 2 }], null);
    expect(div.querySelectorAll("ul.trace li")).toHaveLength(1);
    expect(div.querySelector("ul.trace li")!.textContent).toBe("reward +38 · score 38");
    expect(div.querySelector(".final-score")).toBeNull();

    renderTrace(
      div,
      [
        { reward: 38, score: 38, events: 2 },
        { reward: -9, score: 29, events: 1 },
      ],
      29,
    );
    expect(div.querySelectorAll("ul.trace li")).toHaveLength(2);
    expect(div.querySelector(".final-score")!.textContent).toBe("Final score: 29");
  });
});
