"""Dimension-invariant state encodings.

Two encoders: a localized multi-channel window around the unit on move, with
distant content folded into the outer ring through a piecewise-linear decay,
and a coarse super-cell aggregation of the whole board for upper decision
levels. Both produce fixed-size vectors regardless of board dimensions.
"""

from __future__ import annotations

import numpy as np

from .engine import BLUE, DEFENSE_MULT, MOVE_COST, GameState
from .hexgrid import HexCoord, disk, distance, radial_target

# Channel indices in the local encoding.
CH_FRIENDLY = 0
CH_ENEMY = 1
CH_OBJECTIVE = 2
CH_MOVE_COST = 3
CH_DEFENSE = 4
CH_SUBGOAL = 5
NUM_CHANNELS = 6

DEFAULT_RADIUS = 3
DEFAULT_HORIZON = 12
DEFAULT_CAP = 4.0
DEFAULT_GRID = 4


def decay_weight(d: int, radius: int, horizon: int) -> float:
    """Piecewise-linear spatial decay: 1 inside `radius`, 0 at `horizon`."""
    if radius >= horizon:
        raise ValueError(f"radius must be < horizon ({radius} >= {horizon})")
    if d < 0:
        raise ValueError(f"distance must be >= 0, got {d}")
    if d <= radius:
        return 1.0
    if d >= horizon:
        return 0.0
    return (horizon - d) / (horizon - radius)


def local_length(radius: int) -> int:
    return NUM_CHANNELS * (1 + 3 * radius * (radius + 1)) + 2


def _max_objective_value(state: GameState) -> int:
    return max((v for _, v in state.objectives), default=1)


def encode_local(
    state: GameState,
    unit_id: int,
    radius: int = DEFAULT_RADIUS,
    horizon: int = DEFAULT_HORIZON,
    cap: float = DEFAULT_CAP,
    subgoal: HexCoord | None = None,
    clamp: bool = True,
) -> np.ndarray:
    """Fixed-size local window centered on a unit, independent of board size.

    Cells within `radius` carry exact channel values; off-board cells read as
    impassable (move-cost channel 1, all else 0), identical to water. Units,
    objectives, and the subgoal marker beyond `radius` are decayed by
    decay_weight and added into the ring cell returned by radial_target;
    terrain is never accumulated, so the window cannot see board shape beyond
    the exact zone. Accumulated cells clamp at `cap` unless `clamp` is False.
    """
    unit = state.units.get(unit_id)
    if unit is None:
        raise ValueError(f"unknown or destroyed unit {unit_id}")
    if radius >= horizon:
        raise ValueError(f"radius must be < horizon ({radius} >= {horizon})")

    center = unit.pos
    cells = disk(center, radius)
    n = len(cells)
    cell_index = {cell: i for i, cell in enumerate(cells)}
    grid = np.zeros((NUM_CHANNELS, n))
    max_value = _max_objective_value(state)

    # Exact zone.
    for i, cell in enumerate(cells):
        if not state.in_bounds(cell):
            grid[CH_MOVE_COST, i] = 1.0
            continue
        terrain = state.terrain_at(cell)
        if terrain == "water":
            grid[CH_MOVE_COST, i] = 1.0
        else:
            grid[CH_MOVE_COST, i] = MOVE_COST[terrain] / 2.0
            grid[CH_DEFENSE, i] = DEFENSE_MULT[terrain]
        occupant = state.unit_at(cell)
        if occupant is not None:
            channel = CH_FRIENDLY if occupant.faction == unit.faction else CH_ENEMY
            grid[channel, i] = occupant.strength / 100.0
    for pos, value in state.objectives:
        i = cell_index.get(pos)
        if i is not None:
            grid[CH_OBJECTIVE, i] = value / max_value
    if subgoal is not None and subgoal in cell_index:
        grid[CH_SUBGOAL, cell_index[subgoal]] = 1.0

    # Decayed radial accumulation of distant content into the outer ring.
    def accumulate(pos: HexCoord, channel: int, value: float) -> None:
        d = distance(center, pos)
        if d <= radius or d >= horizon:
            return
        w = decay_weight(d, radius, horizon)
        target = radial_target(center, pos, radius)
        grid[channel, cell_index[target]] += w * value

    for other in state.units.values():
        if distance(center, other.pos) > radius:
            channel = CH_FRIENDLY if other.faction == unit.faction else CH_ENEMY
            accumulate(other.pos, channel, other.strength / 100.0)
    for pos, value in state.objectives:
        if distance(center, pos) > radius:
            accumulate(pos, CH_OBJECTIVE, value / max_value)
    if subgoal is not None and distance(center, subgoal) > radius:
        accumulate(subgoal, CH_SUBGOAL, 1.0)

    if clamp:
        np.minimum(grid, cap, out=grid)

    scalars = np.array([unit.strength / 100.0, state.turn / state.max_turns])
    return np.concatenate([grid.reshape(-1), scalars])


def global_length(grid: int) -> int:
    return 4 * grid * grid + 1


def encode_global(state: GameState, grid: int = DEFAULT_GRID) -> np.ndarray:
    """Coarse G x G super-cell aggregation of the board.

    Equal hex-coordinate bands partition every hex into exactly one super-cell.
    Channels per cell: blue strength/100, red strength/100, objective value
    sum, and the fraction of the cell's objectives currently held by blue.
    One trailing scalar: turn / max_turns.
    """
    if grid < 1:
        raise ValueError(f"grid must be >= 1, got {grid}")
    g = grid

    def cell_of(pos: HexCoord) -> tuple[int, int]:
        sq = min(g - 1, pos[0] * g // state.width)
        sr = min(g - 1, pos[1] * g // state.height)
        return sq, sr

    blue = np.zeros((g, g))
    red = np.zeros((g, g))
    obj_value = np.zeros((g, g))
    obj_count = np.zeros((g, g))
    obj_blue = np.zeros((g, g))

    occ = {u.pos: u for u in state.units.values()}
    for u in state.units.values():
        sq, sr = cell_of(u.pos)
        if u.faction == BLUE:
            blue[sr, sq] += u.strength / 100.0
        else:
            red[sr, sq] += u.strength / 100.0
    for pos, value in state.objectives:
        sq, sr = cell_of(pos)
        obj_value[sr, sq] += value
        obj_count[sr, sq] += 1
        holder = occ.get(pos)
        if holder is not None and holder.faction == BLUE:
            obj_blue[sr, sq] += 1

    held = np.divide(obj_blue, obj_count, out=np.zeros_like(obj_blue), where=obj_count > 0)
    scalar = np.array([state.turn / state.max_turns])
    return np.concatenate(
        [blue.reshape(-1), red.reshape(-1), obj_value.reshape(-1), held.reshape(-1), scalar]
    )
