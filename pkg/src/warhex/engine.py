"""Deterministic turn-based hex combat engine.

Scenario loading, action legality, combat adjudication, the action-selection
step loop, scoring, and replayable episode logs. Scores are blue-positive
throughout: blue maximizes, red minimizes.
"""

from __future__ import annotations

import copy
import hashlib
import json
import math
import random
from dataclasses import dataclass, field
from typing import Callable

from .hexgrid import HexCoord, neighbor

BLUE = "blue"
RED = "red"
FACTIONS = (BLUE, RED)

UNIT_KINDS = ("infantry", "armor")

TERRAIN_BY_CHAR = {"c": "clear", "r": "rough", "u": "urban", "w": "water"}
MOVE_COST = {"clear": 1, "rough": 2, "urban": 1}  # water is impassable
DEFENSE_MULT = {"clear": 1.0, "rough": 0.75, "urban": 0.5}

LOG_SCHEMA = "warhex-episode/1"


class ScenarioError(ValueError):
    """Raised when a scenario document fails validation."""


class IllegalActionError(ValueError):
    """Raised when an action is rejected; the state is left unchanged."""


class ReplayError(ValueError):
    """Raised when replaying a log fails to reproduce a recorded snapshot."""


# ---------------------------------------------------------------------------
# Actions
# ---------------------------------------------------------------------------

PASS, MOVE, ATTACK = "pass", "move", "attack"


@dataclass(frozen=True)
class Action:
    kind: str
    direction: int | None = None

    def to_json(self) -> dict:
        if self.kind == PASS:
            return {"kind": PASS}
        return {"kind": self.kind, "dir": self.direction}

    @staticmethod
    def from_json(doc: dict) -> "Action":
        kind = doc.get("kind")
        if kind == PASS:
            return PASS_ACTION
        if kind in (MOVE, ATTACK):
            d = doc.get("dir")
            if not isinstance(d, int) or not 0 <= d <= 5:
                raise ValueError(f"action dir must be 0..5, got {d!r}")
            return Action(kind, d)
        raise ValueError(f"unknown action kind {kind!r}")


PASS_ACTION = Action(PASS)

# Nominal 13-action space: index 0 = pass, 1..6 = move(d), 7..12 = attack(d).
ACTION_SPACE: tuple[Action, ...] = (
    (PASS_ACTION,)
    + tuple(Action(MOVE, d) for d in range(6))
    + tuple(Action(ATTACK, d) for d in range(6))
)
ACTION_COUNT = len(ACTION_SPACE)
_ACTION_INDEX = {a: i for i, a in enumerate(ACTION_SPACE)}


def action_index(action: Action) -> int:
    return _ACTION_INDEX[action]


# ---------------------------------------------------------------------------
# State
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CombatConfig:
    deterministic: bool = True
    attack_coeff: float = 0.4
    counter_coeff: float = 0.2
    eta_values: tuple[float, ...] = (0.75, 1.0, 1.25)


@dataclass
class Unit:
    id: int
    faction: str
    kind: str
    strength: int
    pos: HexCoord
    acted_this_turn: bool = False


@dataclass
class GameState:
    name: str
    width: int
    height: int
    terrain: list[str]  # one row string per r, chars over c/r/u/w
    objectives: list[tuple[HexCoord, int]]
    units: dict[int, Unit]
    max_turns: int
    combat: CombatConfig
    rng: random.Random
    turn: int = 0
    phase: str = BLUE
    score: int = 0
    # score = objective_points + red_lost - blue_lost, maintained by step()
    objective_points: int = 0
    blue_lost: int = 0
    red_lost: int = 0

    def in_bounds(self, pos: HexCoord) -> bool:
        return 0 <= pos[0] < self.width and 0 <= pos[1] < self.height

    def terrain_at(self, pos: HexCoord) -> str:
        return TERRAIN_BY_CHAR[self.terrain[pos[1]][pos[0]]]

    def unit_at(self, pos: HexCoord) -> Unit | None:
        for u in self.units.values():
            if u.pos == pos:
                return u
        return None

    def faction_units(self, faction: str) -> list[Unit]:
        return [u for u in self.units.values() if u.faction == faction]

    def total_strength(self, faction: str) -> int:
        return sum(u.strength for u in self.units.values() if u.faction == faction)

    def copy(self) -> "GameState":
        """Independent copy sharing nothing mutable (including the RNG state)."""
        dup = GameState(
            name=self.name,
            width=self.width,
            height=self.height,
            terrain=list(self.terrain),
            objectives=list(self.objectives),
            units={uid: copy.copy(u) for uid, u in self.units.items()},
            max_turns=self.max_turns,
            combat=self.combat,
            rng=random.Random(),
            turn=self.turn,
            phase=self.phase,
            score=self.score,
            objective_points=self.objective_points,
            blue_lost=self.blue_lost,
            red_lost=self.red_lost,
        )
        dup.rng.setstate(self.rng.getstate())
        return dup


def snapshot(state: GameState) -> dict:
    """Canonical JSON-serializable view of the dynamic state."""
    return {
        "turn": state.turn,
        "phase": state.phase,
        "score": state.score,
        "units": [
            {
                "id": u.id,
                "faction": u.faction,
                "kind": u.kind,
                "strength": u.strength,
                "q": u.pos[0],
                "r": u.pos[1],
                "acted": u.acted_this_turn,
            }
            for u in sorted(state.units.values(), key=lambda u: u.id)
        ],
    }


def canonical_json(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"))


def terrain_digest(state: GameState) -> str:
    return hashlib.sha256("\n".join(state.terrain).encode()).hexdigest()[:16]


def _derive_seed(seed: int, label: str) -> int:
    digest = hashlib.sha256(f"{seed}/{label}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


# ---------------------------------------------------------------------------
# Scenario I/O
# ---------------------------------------------------------------------------


def load_scenario(doc: dict, seed: int = 0, deterministic: bool | None = None) -> GameState:
    """Build an initial GameState from a scenario document.

    `seed` drives the state's combat RNG stream; `deterministic` overrides the
    scenario's combat block when given.
    """
    if not isinstance(doc, dict):
        raise ScenarioError("scenario must be a JSON object")
    for key in ("width", "height", "max_turns", "terrain", "units"):
        if key not in doc:
            raise ScenarioError(f"scenario missing required field {key!r}")
    width, height = doc["width"], doc["height"]
    if not (isinstance(width, int) and isinstance(height, int) and width > 0 and height > 0):
        raise ScenarioError("width/height must be positive integers")
    max_turns = doc["max_turns"]
    if not (isinstance(max_turns, int) and max_turns > 0):
        raise ScenarioError("max_turns must be a positive integer")

    terrain = doc["terrain"]
    if len(terrain) != height:
        raise ScenarioError(f"terrain must have {height} rows, got {len(terrain)}")
    for r, row in enumerate(terrain):
        if len(row) != width:
            raise ScenarioError(f"terrain row {r} must have {width} cells, got {len(row)}")
        bad = set(row) - set(TERRAIN_BY_CHAR)
        if bad:
            raise ScenarioError(f"terrain row {r} has unknown cells {sorted(bad)}")

    objectives: list[tuple[HexCoord, int]] = []
    for i, obj in enumerate(doc.get("objectives", [])):
        pos = HexCoord(obj["q"], obj["r"])
        value = obj["value"]
        if not (0 <= pos.q < width and 0 <= pos.r < height):
            raise ScenarioError(f"objective {i} at {tuple(pos)} is out of bounds")
        if not (isinstance(value, int) and value > 0):
            raise ScenarioError(f"objective {i} value must be a positive integer")
        objectives.append((pos, value))

    combat_doc = doc.get("combat", {})
    combat = CombatConfig(
        deterministic=bool(combat_doc.get("deterministic", True)),
        attack_coeff=float(combat_doc.get("attack_coeff", 0.4)),
        counter_coeff=float(combat_doc.get("counter_coeff", 0.2)),
        eta_values=tuple(combat_doc.get("eta_values", (0.75, 1.0, 1.25))),
    )
    if deterministic is not None:
        combat = CombatConfig(
            deterministic=deterministic,
            attack_coeff=combat.attack_coeff,
            counter_coeff=combat.counter_coeff,
            eta_values=combat.eta_values,
        )

    units: dict[int, Unit] = {}
    occupied: set[HexCoord] = set()
    for spec in doc["units"]:
        uid = spec["id"]
        faction = spec["faction"]
        kind = spec.get("kind", "infantry")
        strength = spec["strength"]
        pos = HexCoord(spec["q"], spec["r"])
        if uid in units:
            raise ScenarioError(f"duplicate unit id {uid}")
        if faction not in FACTIONS:
            raise ScenarioError(f"unit {uid} has unknown faction {faction!r}")
        if kind not in UNIT_KINDS:
            raise ScenarioError(f"unit {uid} has unknown kind {kind!r}")
        if not (isinstance(strength, int) and 0 < strength <= 100):
            raise ScenarioError(f"unit {uid} strength must be in 1..100")
        if not (0 <= pos.q < width and 0 <= pos.r < height):
            raise ScenarioError(f"unit {uid} at {tuple(pos)} is out of bounds")
        if TERRAIN_BY_CHAR[terrain[pos.r][pos.q]] == "water":
            raise ScenarioError(f"impassable placement: unit {uid} at {tuple(pos)} is on water")
        if pos in occupied:
            raise ScenarioError(f"hex occupied: two units at {tuple(pos)}")
        occupied.add(pos)
        units[uid] = Unit(id=uid, faction=faction, kind=kind, strength=strength, pos=pos)

    return GameState(
        name=str(doc.get("name", "")),
        width=width,
        height=height,
        terrain=list(terrain),
        objectives=objectives,
        units=units,
        max_turns=max_turns,
        combat=combat,
        rng=random.Random(_derive_seed(seed, "combat")),
    )


def load_scenario_file(path: str, seed: int = 0, deterministic: bool | None = None) -> GameState:
    with open(path) as fh:
        doc = json.load(fh)
    return load_scenario(doc, seed=seed, deterministic=deterministic)


# ---------------------------------------------------------------------------
# Legality and stepping
# ---------------------------------------------------------------------------


def _occupancy(state: GameState) -> dict[HexCoord, Unit]:
    return {u.pos: u for u in state.units.values()}


def legal_actions(state: GameState, unit_id: int) -> list[Action]:
    """Legal actions for a living unit, in ascending action-index order."""
    unit = state.units.get(unit_id)
    if unit is None:
        raise IllegalActionError(f"unknown or destroyed unit {unit_id}")
    occ = _occupancy(state)
    actions = [PASS_ACTION]
    for d in range(6):
        dest = neighbor(unit.pos, d)
        if state.in_bounds(dest) and state.terrain_at(dest) != "water" and dest not in occ:
            actions.append(Action(MOVE, d))
    for d in range(6):
        dest = neighbor(unit.pos, d)
        target = occ.get(dest)
        if target is not None and target.faction != unit.faction:
            actions.append(Action(ATTACK, d))
    return actions


def unit_on_move(state: GameState) -> int | None:
    """Id of the next unit to act, or None when the episode is terminal."""
    if state.turn >= state.max_turns:
        return None
    has_blue = has_red = False
    for u in state.units.values():
        if u.faction == BLUE:
            has_blue = True
        else:
            has_red = True
    if not (has_blue and has_red):
        return None
    pending = [
        u.id
        for u in state.units.values()
        if u.faction == state.phase and not u.acted_this_turn
    ]
    return min(pending) if pending else None


def _objective_scoring(state: GameState, events: list[dict]) -> int:
    occ = _occupancy(state)
    delta = 0
    for pos, value in state.objectives:
        holder = occ.get(pos)
        if holder is None:
            continue
        delta += value if holder.faction == BLUE else -value
    if delta:
        events.append({"type": "objective_scoring", "delta": delta})
    return delta


def _advance(state: GameState, events: list[dict]) -> int:
    """Advance phase/turn while the on-move faction has no pending units.

    Returns the blue-positive objective reward accrued by any turn ends.
    """
    reward = 0
    while True:
        if state.turn >= state.max_turns:
            break
        factions = {u.faction for u in state.units.values()}
        if factions != {BLUE, RED}:
            break
        pending = any(
            u.faction == state.phase and not u.acted_this_turn
            for u in state.units.values()
        )
        if pending:
            break
        if state.phase == BLUE:
            state.phase = RED
        else:
            delta = _objective_scoring(state, events)
            state.score += delta
            state.objective_points += delta
            reward += delta
            events.append({"type": "turn_end", "turn": state.turn})
            state.turn += 1
            state.phase = BLUE
            for u in state.units.values():
                u.acted_this_turn = False
    return reward


def step(state: GameState, unit_id: int, action: Action) -> tuple[GameState, int, list[dict]]:
    """Apply one action for the unit on move. Mutates and returns the state.

    The returned reward is the blue-positive score delta caused by this step,
    including end-of-turn objective scoring when this step closes the turn.
    Illegal actions raise IllegalActionError and leave the state unchanged.
    """
    mover = unit_on_move(state)
    if mover is None:
        raise IllegalActionError("episode is terminal; no unit is on move")
    if mover != unit_id:
        raise IllegalActionError(f"unit {unit_id} is not on move (expected {mover})")
    if action not in legal_actions(state, unit_id):
        raise IllegalActionError(f"illegal action {action} for unit {unit_id}")

    unit = state.units[unit_id]
    events: list[dict] = []
    reward = 0

    if action.kind == MOVE:
        dest = neighbor(unit.pos, action.direction)
        events.append(
            {"type": "move", "unit": unit.id, "from": list(unit.pos), "to": list(dest)}
        )
        unit.pos = dest
    elif action.kind == ATTACK:
        dest = neighbor(unit.pos, action.direction)
        defender = state.unit_at(dest)
        eta = 1.0 if state.combat.deterministic else state.rng.choice(state.combat.eta_values)
        mult = DEFENSE_MULT[state.terrain_at(defender.pos)]
        damage = math.ceil(unit.strength * state.combat.attack_coeff * mult * eta)
        dealt = min(damage, defender.strength)
        defender.strength -= dealt
        counter = math.ceil(defender.strength * state.combat.counter_coeff * eta)
        taken = min(counter, unit.strength)
        unit.strength -= taken
        events.append(
            {
                "type": "attack",
                "attacker": unit.id,
                "defender": defender.id,
                "damage": dealt,
                "counter": taken,
                "eta": eta,
            }
        )
        for casualty in (defender, unit):
            if casualty.strength <= 0:
                del state.units[casualty.id]
                events.append({"type": "destroyed", "unit": casualty.id})
        if unit.faction == BLUE:
            blue_hit, red_hit = taken, dealt
        else:
            blue_hit, red_hit = dealt, taken
        state.blue_lost += blue_hit
        state.red_lost += red_hit
        reward = red_hit - blue_hit
        state.score += reward

    if unit_id in state.units:
        unit.acted_this_turn = True

    reward += _advance(state, events)
    return state, reward, events


# ---------------------------------------------------------------------------
# Episodes and logs
# ---------------------------------------------------------------------------

Policy = Callable[[GameState, int], Action]


def as_policy(policy) -> Policy:
    """Accept either a bare callable or an object with an `act` attribute."""
    act = getattr(policy, "act", None)
    return act if callable(act) and not callable(policy) else policy


@dataclass
class StepRecord:
    turn: int
    unit_id: int
    faction: str
    snapshot: dict
    action: Action
    reward: int
    trace: dict | None = None

    def to_json(self) -> dict:
        doc = {
            "type": "step",
            "turn": self.turn,
            "unit": self.unit_id,
            "faction": self.faction,
            "snapshot": self.snapshot,
            "action": self.action.to_json(),
            "reward": self.reward,
        }
        if self.trace is not None:
            doc["trace"] = self.trace
        return doc


@dataclass
class EpisodeLog:
    scenario: dict
    seed: int
    records: list[StepRecord] = field(default_factory=list)
    final_score: int = 0
    final_snapshot: dict | None = None
    objective_points: int = 0
    blue_lost: int = 0
    red_lost: int = 0
    truncated: bool = False

    def to_jsonl(self) -> str:
        lines = [
            canonical_json(
                {"type": "header", "schema": LOG_SCHEMA, "scenario": self.scenario, "seed": self.seed}
            )
        ]
        lines.extend(canonical_json(rec.to_json()) for rec in self.records)
        lines.append(
            canonical_json(
                {
                    "type": "end",
                    "final_score": self.final_score,
                    "final_snapshot": self.final_snapshot,
                    "objective_points": self.objective_points,
                    "blue_lost": self.blue_lost,
                    "red_lost": self.red_lost,
                    "truncated": self.truncated,
                }
            )
        )
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_jsonl(text: str) -> "EpisodeLog":
        lines = [line for line in text.splitlines() if line.strip()]
        header = json.loads(lines[0])
        if header.get("type") != "header" or header.get("schema") != LOG_SCHEMA:
            raise ValueError("not an episode log (bad header)")
        log = EpisodeLog(scenario=header["scenario"], seed=header["seed"])
        for line in lines[1:]:
            doc = json.loads(line)
            if doc["type"] == "step":
                log.records.append(
                    StepRecord(
                        turn=doc["turn"],
                        unit_id=doc["unit"],
                        faction=doc["faction"],
                        snapshot=doc["snapshot"],
                        action=Action.from_json(doc["action"]),
                        reward=doc["reward"],
                        trace=doc.get("trace"),
                    )
                )
            elif doc["type"] == "end":
                log.final_score = doc["final_score"]
                log.final_snapshot = doc.get("final_snapshot")
                log.objective_points = doc.get("objective_points", 0)
                log.blue_lost = doc.get("blue_lost", 0)
                log.red_lost = doc.get("red_lost", 0)
                log.truncated = doc.get("truncated", False)
        return log

    def save(self, path: str) -> None:
        with open(path, "w") as fh:
            fh.write(self.to_jsonl())

    @staticmethod
    def load(path: str) -> "EpisodeLog":
        with open(path) as fh:
            return EpisodeLog.from_jsonl(fh.read())


class EpisodeRecorder:
    """Builds an EpisodeLog step by step; shared by run_episode and the server."""

    def __init__(self, scenario: dict, seed: int):
        self.log = EpisodeLog(scenario=copy.deepcopy(scenario), seed=seed)

    def record(self, state_before: dict, unit: Unit, action: Action, reward: int,
               trace: dict | None = None) -> None:
        self.log.records.append(
            StepRecord(
                turn=state_before["turn"],
                unit_id=unit.id,
                faction=unit.faction,
                snapshot=state_before,
                action=action,
                reward=reward,
                trace=trace,
            )
        )

    def finish(self, state: GameState, truncated: bool = False) -> EpisodeLog:
        self.log.final_score = state.score
        self.log.final_snapshot = snapshot(state)
        self.log.objective_points = state.objective_points
        self.log.blue_lost = state.blue_lost
        self.log.red_lost = state.red_lost
        self.log.truncated = truncated
        return self.log


def run_episode(scenario: dict, blue_policy, red_policy, seed: int,
                deterministic: bool | None = None) -> EpisodeLog:
    """Play one episode to terminal and return its replayable log.

    A policy raising or emitting an illegal action aborts the episode with a
    diagnostic naming the offending side.
    """
    if deterministic is not None:
        # Bake the override into the logged scenario so replay is faithful.
        scenario = dict(scenario)
        scenario["combat"] = {**scenario.get("combat", {}), "deterministic": deterministic}
    state = load_scenario(scenario, seed=seed)
    blue_act = as_policy(blue_policy)
    red_act = as_policy(red_policy)
    recorder = EpisodeRecorder(scenario, seed)
    while (uid := unit_on_move(state)) is not None:
        unit = state.units[uid]
        policy = blue_policy if unit.faction == BLUE else red_policy
        act = blue_act if unit.faction == BLUE else red_act
        before = snapshot(state)
        action = act(state, uid)
        try:
            state, reward, _ = step(state, uid, action)
        except IllegalActionError as exc:
            name = getattr(policy, "name", getattr(policy, "__name__", unit.faction))
            raise IllegalActionError(
                f"policy {name!r} emitted an illegal action for unit {uid}: {exc}"
            ) from exc
        recorder.record(before, unit, action, reward, trace=getattr(policy, "last_trace", None))
    return recorder.finish(state)


def replay_episode(log: EpisodeLog, check_snapshots: bool = True) -> GameState:
    """Re-run a log's actions from its scenario + seed.

    Verifies that every recorded pre-action snapshot (and the final score)
    is reproduced exactly; returns the terminal state.
    """
    state = load_scenario(log.scenario, seed=log.seed)
    for i, rec in enumerate(log.records):
        if check_snapshots and snapshot(state) != rec.snapshot:
            raise ReplayError(f"snapshot mismatch at record {i}")
        uid = unit_on_move(state)
        if uid != rec.unit_id:
            raise ReplayError(f"unit on move mismatch at record {i}: {uid} != {rec.unit_id}")
        if rec.action not in legal_actions(state, uid):
            raise ReplayError(f"recorded action at record {i} is not legal in its pre-state")
        state, reward, _ = step(state, uid, rec.action)
        if reward != rec.reward:
            raise ReplayError(f"reward mismatch at record {i}: {reward} != {rec.reward}")
    if not log.truncated:
        if unit_on_move(state) is not None:
            raise ReplayError("log ended before the episode was terminal")
        if state.score != log.final_score:
            raise ReplayError(f"final score mismatch: {state.score} != {log.final_score}")
        if log.final_snapshot is not None and snapshot(state) != log.final_snapshot:
            raise ReplayError("final snapshot mismatch")
    return state


def state_from_snapshot(scenario: dict, snap: dict) -> GameState:
    """Rebuild a mid-episode GameState from a scenario doc and a snapshot.

    The combat RNG stream is not part of a snapshot; the result is suitable
    for encoding/analysis, not for continuing a stochastic episode.
    """
    state = load_scenario(scenario, seed=0)
    state.turn = snap["turn"]
    state.phase = snap["phase"]
    state.score = snap["score"]
    state.units = {
        u["id"]: Unit(
            id=u["id"],
            faction=u["faction"],
            kind=u["kind"],
            strength=u["strength"],
            pos=HexCoord(u["q"], u["r"]),
            acted_this_turn=u["acted"],
        )
        for u in snap["units"]
    }
    return state
