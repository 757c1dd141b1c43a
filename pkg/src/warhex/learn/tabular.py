"""Tabular Q-learning for enumerably small scenarios."""

from __future__ import annotations

import random

from ..engine import (
    ACTION_SPACE,
    BLUE,
    Action,
    GameState,
    action_index,
    legal_actions,
    load_scenario,
    step,
    unit_on_move,
)
from .config import TrainConfig

MAX_TABLE_KEYS = 1_000_000


class StateSpaceOverflow(RuntimeError):
    """The scenario's reachable state space is too large for a table."""


class QTable:
    """Map from (state key, action index) to value; missing entries read 0."""

    def __init__(self):
        self.values: dict[tuple, float] = {}

    def get(self, key, action: int) -> float:
        return self.values.get((key, action), 0.0)

    def set(self, key, action: int, value: float) -> None:
        self.values[(key, action)] = value

    def best(self, key, legal_indices: list[int]) -> tuple[int, float]:
        """Greedy (action, value) over legal actions; ties to the lowest index."""
        best_a, best_v = None, None
        for a in legal_indices:
            v = self.get(key, a)
            if best_v is None or v > best_v:
                best_a, best_v = a, v
        return best_a, best_v

    def __len__(self) -> int:
        return len(self.values)


def state_key(state: GameState) -> tuple:
    """Canonical key for small-state learning: turn plus per-unit essentials."""
    return (
        state.turn,
        state.phase,
        tuple(
            (u.id, u.faction, u.strength, u.pos[0], u.pos[1], u.acted_this_turn)
            for u in sorted(state.units.values(), key=lambda u: u.id)
        ),
    )


def _legal_indices(state: GameState, unit_id: int) -> list[int]:
    return [action_index(a) for a in legal_actions(state, unit_id)]


class TabularPolicy:
    """Greedy policy extracted from a Q-table (blue faction learner)."""

    def __init__(self, table: QTable):
        self.table = table
        self.name = "tabular"

    def __call__(self, state: GameState, unit_id: int) -> Action:
        legal = _legal_indices(state, unit_id)
        best_a, _ = self.table.best(state_key(state), legal)
        return ACTION_SPACE[best_a]


def tabular_q_learn(
    scenario: dict,
    config: TrainConfig,
    adversary=None,
    steps: int = 50_000,
    learner_faction: str = BLUE,
) -> QTable:
    """One-step Q-learning with epsilon-greedy exploration.

    The learner controls `learner_faction`; the opposing faction plays the
    fixed `adversary` policy (default: pass) folded into the transition.
    Refuses scenarios whose reachable key count exceeds MAX_TABLE_KEYS.
    """
    from ..behaviors import pass_policy

    adversary = adversary if adversary is not None else pass_policy
    sign = 1 if learner_faction == BLUE else -1
    rng = random.Random(config.seed)
    table = QTable()
    seen_keys: set[tuple] = set()

    episode = 0
    state = load_scenario(scenario, seed=config.seed)
    taken = 0
    while taken < steps:
        uid = unit_on_move(state)
        if uid is None:
            episode += 1
            state = load_scenario(scenario, seed=config.seed + episode)
            continue
        unit = state.units[uid]
        if unit.faction != learner_faction:
            state, _, _ = step(state, uid, adversary(state, uid))
            continue

        key = state_key(state)
        seen_keys.add(key)
        if len(seen_keys) > MAX_TABLE_KEYS:
            raise StateSpaceOverflow(
                f"more than {MAX_TABLE_KEYS} distinct state keys reached"
            )
        legal = _legal_indices(state, uid)
        eps = config.eps_end + (config.eps_start - config.eps_end) * max(
            0.0, 1.0 - taken / config.eps_decay_steps
        )
        if rng.random() < eps:
            a = rng.choice(legal)
        else:
            a, _ = table.best(key, legal)
        reward = sign * _apply_until_learner(state, uid, ACTION_SPACE[a], adversary, learner_faction)
        taken += 1

        next_uid = unit_on_move(state)
        if next_uid is None:
            target = float(reward)
        else:
            next_key = state_key(state)
            _, best_v = table.best(next_key, _legal_indices(state, next_uid))
            target = reward + config.gamma * best_v
        old = table.get(key, a)
        table.set(key, a, old + config.alpha * (target - old))
    return table


def _apply_until_learner(state, uid, action, adversary, learner_faction) -> int:
    """Apply the learner's action, then the adversary's replies, until the
    next learner decision point or terminal. Returns accumulated raw reward."""
    state, reward, _ = step(state, uid, action)
    while True:
        nxt = unit_on_move(state)
        if nxt is None or state.units[nxt].faction == learner_faction:
            return reward
        state, r, _ = step(state, nxt, adversary(state, nxt))
        reward += r
