"""Arbitration over a repository of behavior models via score predictors.

Each behavior model is paired with a predictor of the final game score
under the assumption that its faction keeps playing that model. At every
action-selection step all predictors are evaluated on the current state
and the acting faction delegates to the model whose predicted score is
best for it (score is blue-positive).
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

from .behaviors import BUILTIN_POLICIES, build_policy
from .engine import BLUE, RED, Action, GameState, IllegalActionError, legal_actions
from .learn.net import Approximator
from .observation import DEFAULT_GRID, encode_global, global_length

MANIFEST_SCHEMA = "warhex-multimodel/1"


@dataclass
class ScorePredictor:
    """Predicts the final blue-positive score from the global abstraction."""

    behavior_name: str
    adversary_name: str
    net: Approximator
    grid: int = DEFAULT_GRID

    def predict(self, state: GameState) -> float:
        return float(self.net.forward(encode_global(state, grid=self.grid))[0])

    def save(self, path: str) -> None:
        self.net.save(
            path,
            kind="score",
            encoder={
                "obs": "global",
                "grid": self.grid,
                "behavior": self.behavior_name,
                "adversary": self.adversary_name,
            },
        )

    @staticmethod
    def load(path: str) -> "ScorePredictor":
        net, doc = Approximator.load(path)
        enc = doc.get("encoder", {})
        return ScorePredictor(
            behavior_name=enc.get("behavior", ""),
            adversary_name=enc.get("adversary", ""),
            net=net,
            grid=int(enc.get("grid", DEFAULT_GRID)),
        )


@dataclass
class MultiModel:
    """Ordered (behavior model, score predictor) pairs for one faction."""

    pairs: list[tuple]
    faction: str = BLUE
    name: str = "multimodel"
    decision_records: list[dict] = field(default_factory=list)
    last_trace: dict | None = None

    def __post_init__(self):
        if not self.pairs:
            raise ValueError("empty model repository")
        if self.faction not in (BLUE, RED):
            raise ValueError(f"unknown faction {self.faction!r}")

    def model_name(self, index: int) -> str:
        model = self.pairs[index][0]
        return getattr(model, "name", getattr(model, "__name__", f"model_{index}"))

    def predict_all(self, state: GameState) -> list[float]:
        scores = []
        for i, (_, predictor) in enumerate(self.pairs):
            s = predictor.predict(state)
            if not math.isfinite(s):
                raise RuntimeError(
                    f"non-finite score {s!r} from predictor of {self.model_name(i)!r}"
                )
            scores.append(s)
        return scores

    def select(self, scores: list[float]) -> int:
        if len(scores) != len(self.pairs):
            raise ValueError("score count does not match repository size")
        best = 0
        for i in range(1, len(scores)):
            if self.faction == BLUE:
                if scores[i] > scores[best]:
                    best = i
            else:
                if scores[i] < scores[best]:
                    best = i
        return best

    def act(self, state: GameState, unit_id: int) -> Action:
        scores = self.predict_all(state)
        chosen = self.select(scores)
        model = self.pairs[chosen][0]
        action = model(state, unit_id)
        if action not in legal_actions(state, unit_id):
            raise IllegalActionError(
                f"model {self.model_name(chosen)!r} returned illegal action {action}"
            )
        record = {
            "turn": state.turn,
            "unit": unit_id,
            "scores": scores,
            "selected": chosen,
            "model": self.model_name(chosen),
        }
        self.decision_records.append(record)
        self.last_trace = {"scores": scores, "selected": chosen, "model": record["model"]}
        return action

    __call__ = act


def constant_predictor(value: float, grid: int = DEFAULT_GRID, name: str = "const") -> ScorePredictor:
    """A predictor that outputs `value` everywhere (zero weights, bias=value)."""
    net = Approximator([global_length(grid), 1], seed=0)
    net.weights[0][:] = 0.0
    net.biases[0][:] = value
    return ScorePredictor(behavior_name=name, adversary_name="", net=net, grid=grid)


def load_multimodel(path: str, scenario: dict | None = None, seed: int | None = None) -> MultiModel:
    """Build a MultiModel from a manifest file.

    Manifest: {"schema": ..., "faction": "blue"|"red", "pairs": [
        {"behavior": <builtin name or model file>, "predictor": <file>,
         "adversary": <name>}, ...]}
    Relative file refs resolve against the manifest's directory.
    """
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("schema") != MANIFEST_SCHEMA:
        raise ValueError(f"not a multimodel manifest (schema {doc.get('schema')!r})")
    base = os.path.dirname(os.path.abspath(path))
    faction = doc.get("faction", BLUE)
    pairs = []
    for i, entry in enumerate(doc.get("pairs", [])):
        behavior_ref = entry["behavior"]
        if behavior_ref in BUILTIN_POLICIES:
            model = build_policy(behavior_ref, seed=seed, scenario=scenario)
        else:
            from .learn.dqn import GreedyNetPolicy

            model = GreedyNetPolicy.load(os.path.join(base, behavior_ref))
            model.name = os.path.basename(behavior_ref)
        predictor = ScorePredictor.load(os.path.join(base, entry["predictor"]))
        if not predictor.adversary_name:
            predictor.adversary_name = entry.get("adversary", "")
        pairs.append((model, predictor))
    return MultiModel(pairs=pairs, faction=faction)
