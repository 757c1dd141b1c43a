"""Scripted behavior models: baselines, adversaries, and repository members.

Every policy returns a member of legal_actions for the prompted unit. Pathing
is greedy with no search; when no strictly improving move exists the policies
fall back to Pass, so water pockets can stall them (known baseline limit).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Callable

from .engine import (
    ATTACK,
    MOVE,
    PASS_ACTION,
    Action,
    GameState,
    Unit,
    legal_actions,
)
from .hexgrid import HexCoord, distance, neighbor

POSTURES = ("seize", "defend", "attrit")
ATTRIT_RANGE = 4


@dataclass(frozen=True)
class Subgoal:
    """Option-level directive: a target hex, a posture, a persistence horizon."""

    target: HexCoord
    posture: str = "seize"
    horizon: int = 4

    def __post_init__(self):
        if self.posture not in POSTURES:
            raise ValueError(f"unknown posture {self.posture!r}")
        if self.horizon < 1:
            raise ValueError("subgoal horizon must be >= 1")


@dataclass
class BehaviorModel:
    """Named action-producing policy eligible for the multi-model repository."""

    name: str
    act: Callable[[GameState, int], Action]
    deterministic: bool = True

    def __call__(self, state: GameState, unit_id: int) -> Action:
        return self.act(state, unit_id)


def _enemies(state: GameState, unit: Unit) -> list[Unit]:
    return [u for u in state.units.values() if u.faction != unit.faction]


def _attack_weakest_adjacent(state: GameState, unit: Unit, legal: list[Action]) -> Action | None:
    """Attack the weakest adjacent enemy; ties break to the lowest direction."""
    best = None
    for a in legal:
        if a.kind != ATTACK:
            continue
        target = state.unit_at(neighbor(unit.pos, a.direction))
        if best is None or target.strength < best[0]:
            best = (target.strength, a)
    return best[1] if best else None


def _move_toward(unit: Unit, goal: HexCoord, legal: list[Action]) -> Action | None:
    """Strictly distance-reducing legal move; ties to the lowest direction."""
    here = distance(unit.pos, goal)
    best = None
    for a in legal:
        if a.kind != MOVE:
            continue
        d = distance(neighbor(unit.pos, a.direction), goal)
        if d < here and (best is None or d < best[0]):
            best = (d, a)
    return best[1] if best else None


def _nearest(units: list[Unit], pos: HexCoord) -> Unit | None:
    """Nearest unit by hex distance; ties break to the lowest id."""
    return min(units, key=lambda u: (distance(pos, u.pos), u.id), default=None)


def pass_policy(state: GameState, unit_id: int) -> Action:
    return PASS_ACTION


class RandomPolicy:
    """Uniform over legal actions, drawing from an owned RNG stream."""

    def __init__(self, seed: int | None = None, rng: random.Random | None = None):
        self.rng = rng if rng is not None else random.Random(seed)

    def __call__(self, state: GameState, unit_id: int) -> Action:
        return self.rng.choice(legal_actions(state, unit_id))


def greedy_attack_policy(state: GameState, unit_id: int) -> Action:
    """Attack the weakest adjacent enemy, else close on the nearest one."""
    unit = state.units[unit_id]
    legal = legal_actions(state, unit_id)
    attack = _attack_weakest_adjacent(state, unit, legal)
    if attack is not None:
        return attack
    enemies = _enemies(state, unit)
    if enemies:
        goal = _nearest(enemies, unit.pos).pos
    else:
        if not state.objectives:
            return PASS_ACTION
        goal = max(state.objectives, key=lambda o: o[1])[0]
    return _move_toward(unit, goal, legal) or PASS_ACTION


def objective_hold_policy(state: GameState, unit_id: int) -> Action:
    """Walk to the nearest objective and sit on it; fight off adjacent enemies."""
    unit = state.units[unit_id]
    legal = legal_actions(state, unit_id)
    if not state.objectives:
        return PASS_ACTION
    goal = min(state.objectives, key=lambda o: distance(unit.pos, o[0]))[0]
    if unit.pos == goal:
        return _attack_weakest_adjacent(state, unit, legal) or PASS_ACTION
    return _move_toward(unit, goal, legal) or PASS_ACTION


def goal_seek_policy(state: GameState, unit_id: int, goal: Subgoal) -> Action:
    """Goal-conditioned unit behavior for one subgoal posture.

    seize: fight adjacent enemies, otherwise advance on the target.
    defend: hold the target hex, fighting only when adjacent.
    attrit: hunt enemies while within ATTRIT_RANGE of the target, else close.
    """
    unit = state.units[unit_id]
    legal = legal_actions(state, unit_id)
    attack = _attack_weakest_adjacent(state, unit, legal)
    if goal.posture in ("seize", "defend"):
        if attack is not None:
            return attack
        if unit.pos == goal.target:
            return PASS_ACTION
        return _move_toward(unit, goal.target, legal) or PASS_ACTION
    # attrit
    if attack is not None:
        return attack
    if distance(unit.pos, goal.target) <= ATTRIT_RANGE:
        enemies = _enemies(state, unit)
        if enemies:
            return _move_toward(unit, _nearest(enemies, unit.pos).pos, legal) or PASS_ACTION
    return _move_toward(unit, goal.target, legal) or PASS_ACTION


class GoalSeekPolicy:
    """goal_seek_policy bound to a fixed subgoal (CLI's "goal" spec)."""

    def __init__(self, goal: Subgoal):
        self.goal = goal

    def __call__(self, state: GameState, unit_id: int) -> Action:
        return goal_seek_policy(state, unit_id, self.goal)


BUILTIN_POLICIES = ("pass", "random", "greedy", "hold", "goal")


def build_policy(name: str, seed: int | None = None,
                 scenario: dict | None = None) -> BehaviorModel:
    """Look up a scripted policy by its CLI/config name."""
    if name == "pass":
        return BehaviorModel("pass", pass_policy)
    if name == "random":
        return BehaviorModel("random", RandomPolicy(seed=seed), deterministic=False)
    if name == "greedy":
        return BehaviorModel("greedy", greedy_attack_policy)
    if name == "hold":
        return BehaviorModel("hold", objective_hold_policy)
    if name == "goal":
        objectives = (scenario or {}).get("objectives", [])
        if not objectives:
            raise ValueError("the 'goal' policy needs a scenario with objectives")
        top = max(objectives, key=lambda o: o["value"])
        goal = Subgoal(HexCoord(top["q"], top["r"]), "seize")
        return BehaviorModel("goal", GoalSeekPolicy(goal))
    raise ValueError(f"unknown policy {name!r} (expected one of {BUILTIN_POLICIES})")
