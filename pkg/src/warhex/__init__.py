"""Turn-based hex wargame with learned and hierarchical decision policies."""

from .engine import (
    BLUE,
    RED,
    Action,
    EpisodeLog,
    GameState,
    IllegalActionError,
    ScenarioError,
    load_scenario,
    load_scenario_file,
    replay_episode,
    run_episode,
    step,
    unit_on_move,
)
from .hexgrid import HexCoord, disk, distance, neighbor, ring
from .observation import encode_global, encode_local

__version__ = "0.1.0"

__all__ = [
    "Action",
    "BLUE",
    "EpisodeLog",
    "GameState",
    "HexCoord",
    "IllegalActionError",
    "RED",
    "ScenarioError",
    "disk",
    "distance",
    "encode_global",
    "encode_local",
    "load_scenario",
    "load_scenario_file",
    "neighbor",
    "replay_episode",
    "ring",
    "run_episode",
    "step",
    "unit_on_move",
]
