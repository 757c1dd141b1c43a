"""Independent reference computations the tests check the package against.

Everything here is deliberately brute-force: graph search instead of closed
forms, exhaustive scans instead of indexed lookups, dynamic programming
instead of learned values. None of it shares code with the package beyond
primitive data access.
"""

from __future__ import annotations

import math
from collections import deque

# Axial neighbor offsets, restated independently from first principles
# (pointy-top axial coordinates, east then counterclockwise).
NEIGHBOR_OFFSETS = [(1, 0), (1, -1), (0, -1), (-1, 0), (-1, 1), (0, 1)]


def bfs_distance(a: tuple[int, int], b: tuple[int, int], limit: int = 32) -> int | None:
    """Shortest path length on the unbounded hex graph by breadth-first search."""
    if a == b:
        return 0
    seen = {a}
    frontier = deque([(a, 0)])
    while frontier:
        (q, r), d = frontier.popleft()
        if d >= limit:
            continue
        for dq, dr in NEIGHBOR_OFFSETS:
            nxt = (q + dq, r + dr)
            if nxt == b:
                return d + 1
            if nxt not in seen:
                seen.add(nxt)
                frontier.append((nxt, d + 1))
    return None


def scripted_attack(
    att_strength: int,
    def_strength: int,
    defense_mult: float,
    eta: float = 1.0,
    attack_coeff: float = 0.4,
    counter_coeff: float = 0.2,
) -> tuple[int, int, int, int]:
    """Reference adjudication: (dealt, counter taken, defender left, attacker left).

    Damage in both directions is clamped to the remaining strength, so no
    exchange can remove more strength than a unit holds.
    """
    damage = math.ceil(att_strength * attack_coeff * defense_mult * eta)
    dealt = min(damage, def_strength)
    def_left = def_strength - dealt
    counter = math.ceil(def_left * counter_coeff * eta) if def_left > 0 else 0
    taken = min(counter, att_strength)
    return dealt, taken, def_left, att_strength - taken


def enumerate_mdp(scenario: dict, adversary, learner_faction: str = "blue"):
    """Breadth-first enumeration of the learner's decision-point MDP.

    Returns (keys, transitions) where transitions[key][action_index] =
    (reward, next_key or None). The adversary's replies are folded into
    each transition, exactly as the learner experiences them.
    """
    from warhex.engine import ACTION_SPACE, action_index, legal_actions, load_scenario, step, unit_on_move
    from warhex.learn.tabular import state_key

    def advance_to_learner(state):
        """Run adversary moves until a learner decision point; returns reward."""
        total = 0
        while True:
            uid = unit_on_move(state)
            if uid is None or state.units[uid].faction == learner_faction:
                return total
            state, r, _ = step(state, uid, adversary(state, uid))
            total += r

    init = load_scenario(scenario, seed=0)
    pre = advance_to_learner(init)
    assert pre == 0, "adversary should not score before the first decision"
    start = state_key(init)
    frontier = deque([init])
    transitions: dict = {start: {}}
    states_by_key = {start: init}
    while frontier:
        state = frontier.popleft()
        key = state_key(state)
        uid = unit_on_move(state)
        for action in legal_actions(state, uid):
            child = state.copy()
            child, reward, _ = step(child, uid, action)
            reward += advance_to_learner(child)
            if unit_on_move(child) is None:
                transitions[key][action_index(action)] = (reward, None)
                continue
            child_key = state_key(child)
            transitions[key][action_index(action)] = (reward, child_key)
            if child_key not in transitions:
                transitions[child_key] = {}
                states_by_key[child_key] = child
                frontier.append(child)
    return states_by_key, transitions


def value_iteration(transitions: dict, gamma: float, tol: float = 1e-12):
    """Exact optimal values and argmax action sets for an enumerated MDP."""
    values = {key: 0.0 for key in transitions}
    while True:
        delta = 0.0
        for key, acts in transitions.items():
            best = max(
                reward + (gamma * values[nxt] if nxt is not None else 0.0)
                for reward, nxt in acts.values()
            )
            delta = max(delta, abs(best - values[key]))
            values[key] = best
        if delta < tol:
            break
    optimal = {}
    for key, acts in transitions.items():
        q = {
            a: reward + (gamma * values[nxt] if nxt is not None else 0.0)
            for a, (reward, nxt) in acts.items()
        }
        top = max(q.values())
        optimal[key] = {a for a, v in q.items() if v >= top - 1e-9}
    return values, optimal
