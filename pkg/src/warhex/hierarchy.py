"""Three-level command hierarchy: commander, managers, units.

The commander assigns objectives to managers once per turn from the coarse
board abstraction. Each manager translates its assignment into per-unit
subgoals that persist for a fixed horizon (or until satisfied). Only the
unit level emits primitive actions, through a goal-conditioned policy.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field

from .behaviors import POSTURES, Subgoal, goal_seek_policy
from .engine import (
    BLUE,
    RED,
    Action,
    GameState,
    load_scenario,
    step,
    unit_on_move,
)
from .hexgrid import HexCoord, fractional_distance, ring, round_to_hex
from .observation import DEFAULT_GRID, encode_global

log = logging.getLogger(__name__)

MIN_GROUP = 3
MAX_GROUP = 5
SEED_DISTANCE = 6.0  # beyond this a unit starts its own group
HUNT_RANGE = 6  # non-holders chase enemies this close

OBJECTIVE_MODE = "objective"
ATTRIT_MODE = "attrit"


@dataclass
class ManagerAgent:
    """One group of units plus its standing orders."""

    id: int
    faction: str
    unit_ids: list[int]
    objective: HexCoord | None = None
    mode: str = OBJECTIVE_MODE
    subgoals: dict[int, Subgoal] = field(default_factory=dict)
    horizon_start: int = -1
    undersized: bool = False

    def alive_ids(self, state: GameState) -> list[int]:
        return [uid for uid in self.unit_ids if uid in state.units]

    def centroid(self, state: GameState) -> tuple[float, float]:
        alive = self.alive_ids(state)
        if not alive:
            return (0.0, 0.0)
        qs = [state.units[uid].pos[0] for uid in alive]
        rs = [state.units[uid].pos[1] for uid in alive]
        return (sum(qs) / len(qs), sum(rs) / len(rs))


@dataclass
class CommanderAgent:
    """Top level: one assignment per manager, revised each turn."""

    faction: str
    manager_ids: list[int]
    assignment: dict[int, tuple[HexCoord, str]] = field(default_factory=dict)
    # Optional hook: (abstraction, state) -> ranked objective indices.
    policy: object | None = None


def partition_units(state: GameState, faction: str) -> list[ManagerAgent]:
    """Greedy spatial clustering of a faction's units into manager groups.

    Units are visited in ascending id order. A unit seeds a new group when
    every group is full or the nearest joinable group's centroid is more
    than SEED_DISTANCE away; otherwise it joins the nearest non-full group.
    A final pass folds groups below MIN_GROUP into their nearest neighbor
    when the merged size stays within MAX_GROUP, otherwise flags them.
    """
    units = sorted(state.faction_units(faction), key=lambda u: u.id)
    if not units:
        raise ValueError(f"faction {faction!r} has no units")

    groups: list[list[int]] = []
    centroids: list[tuple[float, float]] = []

    def recenter(i: int) -> None:
        members = [state.units[uid].pos for uid in groups[i]]
        centroids[i] = (
            sum(p[0] for p in members) / len(members),
            sum(p[1] for p in members) / len(members),
        )

    for u in units:
        open_groups = [i for i in range(len(groups)) if len(groups[i]) < MAX_GROUP]
        best = None
        if open_groups:
            best = min(
                open_groups,
                key=lambda i: (fractional_distance(u.pos, centroids[i]), i),
            )
        if best is None or fractional_distance(u.pos, centroids[best]) > SEED_DISTANCE:
            groups.append([u.id])
            centroids.append((float(u.pos[0]), float(u.pos[1])))
        else:
            groups[best].append(u.id)
            recenter(best)

    undersized: set[int] = set()
    for i in range(len(groups)):
        if len(groups[i]) >= MIN_GROUP:
            continue
        candidates = [
            j
            for j in range(len(groups))
            if j != i and groups[j] and len(groups[j]) + len(groups[i]) <= MAX_GROUP
        ]
        if candidates:
            j = min(
                candidates,
                key=lambda j: (fractional_distance(centroids[i], centroids[j]), j),
            )
            groups[j].extend(groups[i])
            groups[i] = []
            recenter(j)
        else:
            undersized.add(i)

    managers = []
    for i, members in enumerate(g for g in groups if g):
        managers.append(
            ManagerAgent(id=i, faction=faction, unit_ids=sorted(members))
        )
    # Re-derive the undersized flag after compaction shifted indices.
    for mgr in managers:
        mgr.undersized = len(mgr.unit_ids) < MIN_GROUP
    return managers


def objective_scores(state: GameState, faction: str, grid: int = DEFAULT_GRID) -> list[float]:
    """Commander's objective ranking: value minus half the nearest enemy
    super-cell strength (strength in the abstraction's units of 100)."""
    vec = encode_global(state, grid=grid)
    g = grid
    cells = g * g
    enemy = vec[cells : 2 * cells] if faction == BLUE else vec[0:cells]
    enemy = enemy.reshape(g, g)
    occupied = [(sq, sr) for sr in range(g) for sq in range(g) if enemy[sr, sq] > 0]

    def cell_of(pos: HexCoord) -> tuple[int, int]:
        return (
            min(g - 1, pos[0] * g // state.width),
            min(g - 1, pos[1] * g // state.height),
        )

    scores = []
    for pos, value in state.objectives:
        sq, sr = cell_of(pos)
        if occupied:
            dmin = min(max(abs(sq - oq), abs(sr - orr)) for oq, orr in occupied)
            threat = max(
                enemy[orr, oq]
                for oq, orr in occupied
                if max(abs(sq - oq), abs(sr - orr)) == dmin
            )
        else:
            threat = 0.0
        scores.append(float(value) - 0.5 * float(threat))
    return scores


def _enemy_mass_centroid(state: GameState, faction: str) -> HexCoord | None:
    enemies = [u for u in state.units.values() if u.faction != faction]
    if not enemies:
        return None
    total = sum(u.strength for u in enemies)
    qf = sum(u.pos[0] * u.strength for u in enemies) / total
    rf = sum(u.pos[1] * u.strength for u in enemies) / total
    return round_to_hex(qf, rf)


def commander_decide(
    commander: CommanderAgent,
    state: GameState,
    managers: list[ManagerAgent],
    grid: int = DEFAULT_GRID,
) -> dict[int, tuple[HexCoord, str]]:
    """Assign each manager an objective hex (or an attrit target).

    Objectives are ranked by objective_scores (hook: commander.policy may
    supply the ranking); each ranked objective takes the nearest unassigned
    manager, ties to the lowest manager id. Surplus managers fall back to
    their own nearest objective. Without objectives every manager is sent
    at the enemy's strength-weighted centroid in attrit mode.
    """
    assignment: dict[int, tuple[HexCoord, str]] = {}
    if not state.objectives:
        target = _enemy_mass_centroid(state, commander.faction)
        for mgr in managers:
            fallback = round_to_hex(*mgr.centroid(state))
            assignment[mgr.id] = (target or fallback, ATTRIT_MODE)
        commander.assignment = assignment
        return assignment

    if commander.policy is not None:
        ranked = list(commander.policy(encode_global(state, grid=grid), state))
    else:
        scores = objective_scores(state, commander.faction, grid=grid)
        ranked = sorted(range(len(scores)), key=lambda i: (-scores[i], i))

    unassigned = {mgr.id: mgr for mgr in managers}
    for obj_index in ranked:
        if not unassigned:
            break
        pos, _ = state.objectives[obj_index]
        mid = min(
            unassigned,
            key=lambda m: (fractional_distance(unassigned[m].centroid(state), pos), m),
        )
        assignment[mid] = (pos, OBJECTIVE_MODE)
        del unassigned[mid]
    for mid, mgr in sorted(unassigned.items()):
        pos = min(
            (p for p, _ in state.objectives),
            key=lambda p: fractional_distance(mgr.centroid(state), p),
        )
        assignment[mid] = (pos, OBJECTIVE_MODE)
    commander.assignment = assignment
    return assignment


def manager_decide(mgr: ManagerAgent, state: GameState, horizon: int = 4) -> dict[int, Subgoal]:
    """Translate the manager's assignment into per-unit subgoals.

    Unheld objective: everyone seizes it. Held by own faction: holders in
    the group defend; the rest attrit the nearest enemy within HUNT_RANGE
    of themselves, else seize distinct hexes adjacent to the objective in
    ring order. Attrit-mode assignments send everyone at the target.
    """
    if mgr.objective is None:
        raise ValueError(f"manager {mgr.id} has no assignment")
    alive = mgr.alive_ids(state)
    target = mgr.objective
    subgoals: dict[int, Subgoal] = {}

    if mgr.mode == ATTRIT_MODE:
        for uid in alive:
            subgoals[uid] = Subgoal(target, "attrit", horizon)
        return subgoals

    holder = state.unit_at(target)
    held = holder is not None and holder.faction == mgr.faction
    if not held:
        for uid in alive:
            subgoals[uid] = Subgoal(target, "seize", horizon)
        return subgoals

    adjacent = [
        c
        for c in ring(target, 1)
        if state.in_bounds(c) and state.terrain_at(c) != "water"
    ]
    next_adjacent = 0
    for uid in alive:
        unit = state.units[uid]
        if unit.pos == target:
            subgoals[uid] = Subgoal(target, "defend", horizon)
            continue
        enemies = [u for u in state.units.values() if u.faction != mgr.faction]
        near = [
            u
            for u in enemies
            if fractional_distance(unit.pos, u.pos) <= HUNT_RANGE
        ]
        if near:
            prey = min(near, key=lambda u: (fractional_distance(unit.pos, u.pos), u.id))
            subgoals[uid] = Subgoal(prey.pos, "attrit", horizon)
        elif next_adjacent < len(adjacent):
            subgoals[uid] = Subgoal(adjacent[next_adjacent], "seize", horizon)
            next_adjacent += 1
        else:
            subgoals[uid] = Subgoal(target, "defend", horizon)
    return subgoals


def subgoal_satisfied(state: GameState, unit_id: int, sub: Subgoal | None) -> bool:
    """Seize completes on arrival; attrit when the target hex holds no enemy;
    defend never self-completes (it ends at the horizon)."""
    if sub is None:
        return True
    unit = state.units.get(unit_id)
    if unit is None:
        return True
    if sub.posture == "defend":
        return False
    if unit.pos == sub.target:
        return True
    if sub.posture == "attrit":
        occ = state.unit_at(sub.target)
        return occ is None or occ.faction == unit.faction
    return False


class HierarchicalPolicy:
    """Commander/manager/unit stack exposed as a per-unit policy."""

    deterministic = True

    def __init__(
        self,
        faction: str = BLUE,
        horizon: int = 4,
        unit_policy=goal_seek_policy,
        grid: int = DEFAULT_GRID,
        manager_policy=None,
    ):
        self.name = "hierarchy"
        self.faction = faction
        self.horizon = horizon
        self.unit_policy = unit_policy
        self.grid = grid
        self.manager_policy = manager_policy
        self.commander: CommanderAgent | None = None
        self.managers: list[ManagerAgent] | None = None
        self.last_commander_turn = -1
        self.last_trace: dict | None = None

    def _ensure_built(self, state: GameState) -> None:
        if self.managers is None:
            self.managers = partition_units(state, self.faction)
            self.commander = CommanderAgent(
                faction=self.faction, manager_ids=[m.id for m in self.managers]
            )

    def group_of(self, state: GameState, unit_id: int) -> ManagerAgent:
        for mgr in self.managers:
            if unit_id in mgr.unit_ids:
                return mgr
        pos = state.units[unit_id].pos
        mgr = min(
            self.managers,
            key=lambda m: (fractional_distance(pos, m.centroid(state)), m.id),
        )
        log.warning("unit %d not in any group; attached to group %d", unit_id, mgr.id)
        mgr.unit_ids.append(unit_id)
        mgr.unit_ids.sort()
        return mgr

    def __call__(self, state: GameState, unit_id: int) -> Action:
        return hierarchical_act(self, state, unit_id)


def hierarchical_act(h: HierarchicalPolicy, state: GameState, unit_id: int) -> Action:
    """Resolve one unit's action through the hierarchy.

    Commander assignments refresh once per turn; manager subgoals refresh
    only at persistence boundaries (horizon elapsed or the acting unit's
    subgoal satisfied). The returned primitive action comes solely from
    the unit-level goal-conditioned policy.
    """
    h._ensure_built(state)
    if state.turn != h.last_commander_turn:
        commander_decide(h.commander, state, h.managers, grid=h.grid)
        h.last_commander_turn = state.turn

    mgr = h.group_of(state, unit_id)
    target, mode = h.commander.assignment[mgr.id]
    mgr.objective, mgr.mode = target, mode

    boundary = (
        mgr.horizon_start < 0
        or state.turn - mgr.horizon_start >= h.horizon
        or unit_id not in mgr.subgoals
        or subgoal_satisfied(state, unit_id, mgr.subgoals.get(unit_id))
    )
    if boundary:
        decide = h.manager_policy or manager_decide
        subgoals = decide(mgr, state, h.horizon)
        assert all(isinstance(s, Subgoal) for s in subgoals.values())
        mgr.subgoals = subgoals
        mgr.horizon_start = state.turn

    sub = mgr.subgoals[unit_id]
    action = h.unit_policy(state, unit_id, sub)
    assert isinstance(action, Action), "unit level must emit primitive actions"
    h.last_trace = {
        "commander": {str(m): [list(a[0]), a[1]] for m, a in h.commander.assignment.items()},
        "manager": mgr.id,
        "subgoal": {"target": list(sub.target), "posture": sub.posture},
        "action": action.to_json(),
    }
    return action


# -- option-level training ----------------------------------------------------


class TrainedManagerPolicy:
    """Greedy option selection from a learned semi-Markov Q-table."""

    def __init__(self, templates: list[tuple[HexCoord, str]], qtable: dict, grid: int):
        self.templates = templates
        self.qtable = qtable
        self.grid = grid

    def option_values(self, state: GameState, faction: str) -> list[float]:
        key = _option_state_key(state, faction, self.grid)
        return [self.qtable.get((key, o), 0.0) for o in range(len(self.templates))]

    def decide(self, state: GameState, faction: str) -> tuple[HexCoord, str]:
        values = self.option_values(state, faction)
        best = max(range(len(values)), key=lambda o: (values[o], -o))
        return self.templates[best]

    def as_manager_policy(self, faction: str):
        """Adapter to the manager_policy hook of HierarchicalPolicy: the
        selected (target, posture) becomes every group member's subgoal."""

        def decide_subgoals(mgr, state, horizon):
            target, posture = self.decide(state, faction)
            return {uid: Subgoal(target, posture, horizon) for uid in mgr.alive_ids(state)}

        return decide_subgoals


def option_templates(scenario_state: GameState) -> list[tuple[HexCoord, str]]:
    """Manager action space: one (target, posture) per objective and posture."""
    templates = []
    for pos, _ in scenario_state.objectives:
        for posture in POSTURES:
            templates.append((pos, posture))
    return templates


def _option_state_key(state: GameState, faction: str, grid: int) -> tuple:
    """Discretized global abstraction over the group's bounding super-cells,
    plus coarse faction strength scalars."""
    g = grid
    vec = encode_global(state, grid=g)
    own = [u.pos for u in state.faction_units(faction)]
    if own:
        sqs = [min(g - 1, p[0] * g // state.width) for p in own]
        srs = [min(g - 1, p[1] * g // state.height) for p in own]
        lo_q, hi_q = min(sqs), max(sqs)
        lo_r, hi_r = min(srs), max(srs)
    else:
        lo_q = hi_q = lo_r = hi_r = 0
    cells = g * g
    picked = []
    for channel in range(4):
        for sr in range(lo_r, hi_r + 1):
            for sq in range(lo_q, hi_q + 1):
                picked.append(round(float(vec[channel * cells + sr * g + sq]), 1))
    own_strength = state.total_strength(faction)
    enemy_strength = state.total_strength(BLUE if faction == RED else RED)
    return (
        (lo_q, hi_q, lo_r, hi_r),
        tuple(picked),
        own_strength // 25,
        enemy_strength // 25,
    )


def train_manager_options(
    scenario: dict,
    unit_policy,
    config,
    adversary=None,
    learner_faction: str = BLUE,
    grid: int = DEFAULT_GRID,
) -> TrainedManagerPolicy:
    """Semi-Markov Q-learning over (objective, posture) option templates.

    The frozen unit policy executes each selected option for the config's
    option horizon; the option reward is the per-turn score delta,
    discounted per turn, sign-adjusted for the learner's faction.
    """
    from .behaviors import pass_policy

    adversary = adversary if adversary is not None else pass_policy
    sign = 1 if learner_faction == BLUE else -1
    rng = random.Random(config.seed)
    probe = load_scenario(scenario, seed=config.seed)
    templates = option_templates(probe)
    if not templates:
        raise ValueError("scenario has no objectives to build option templates from")
    qtable: dict = {}

    def best_value(key) -> float:
        return max((qtable.get((key, o), 0.0) for o in range(len(templates))), default=0.0)

    for episode in range(config.episodes):
        state = load_scenario(scenario, seed=config.seed + episode)
        while unit_on_move(state) is not None:
            key = _option_state_key(state, learner_faction, grid)
            if rng.random() < config.eps_start + (
                config.eps_end - config.eps_start
            ) * min(1.0, episode / max(1, config.episodes - 1)):
                option = rng.randrange(len(templates))
            else:
                option = max(
                    range(len(templates)),
                    key=lambda o: (qtable.get((key, o), 0.0), -o),
                )
            target, posture = templates[option]
            sub = Subgoal(target, posture, config.option_horizon)

            reward = 0.0
            tau = 0
            start_turn = state.turn
            while (
                unit_on_move(state) is not None
                and state.turn < start_turn + config.option_horizon
            ):
                turn_before = state.turn
                score_before = state.score
                while unit_on_move(state) is not None and state.turn == turn_before:
                    uid = unit_on_move(state)
                    if state.units[uid].faction == learner_faction:
                        state, _, _ = step(state, uid, unit_policy(state, uid, sub))
                    else:
                        state, _, _ = step(state, uid, adversary(state, uid))
                reward += (config.gamma**tau) * sign * (state.score - score_before)
                tau += 1

            old = qtable.get((key, option), 0.0)
            if unit_on_move(state) is None:
                target_value = reward
            else:
                next_key = _option_state_key(state, learner_faction, grid)
                target_value = reward + (config.gamma**tau) * best_value(next_key)
            updated = old + config.alpha * (target_value - old)
            if not (updated == updated and abs(updated) < 1e12):
                raise RuntimeError(
                    f"option value diverged at episode {episode}: {updated!r}"
                )
            qtable[(key, option)] = updated

    return TrainedManagerPolicy(templates, qtable, grid)
