"""Deep Q-learning over localized observations."""

from __future__ import annotations

import random

import numpy as np

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
from ..observation import encode_local, local_length
from .config import TrainConfig
from .net import Approximator
from .replay import ReplayBuffer, Transition


class TrainingDiverged(RuntimeError):
    """Loss became non-finite; the run is unrecoverable."""


def q_update(
    online: Approximator,
    target: Approximator,
    batch: list[Transition],
    gamma: float,
    lr: float,
) -> float:
    """One stochastic-gradient step on the Bellman regression loss.

    Targets: y = r for terminal transitions, else r + gamma * max_a' Q_target.
    Only the taken action's output enters the per-sample squared error.
    Returns the batch mean squared error before the step.
    """
    if not batch:
        raise ValueError("empty batch")
    n = len(batch)
    xs = np.stack([t.obs for t in batch])
    preds, activations = online._forward_cached(xs)

    next_xs = np.stack([t.next_obs for t in batch])
    next_q = target.forward_batch(next_xs)
    ys = np.empty(n)
    for i, t in enumerate(batch):
        if t.terminal:
            ys[i] = t.reward
        else:
            ys[i] = t.reward + gamma * float(next_q[i].max())

    actions = np.array([t.action for t in batch])
    taken = preds[np.arange(n), actions]
    err = taken - ys
    loss = float(np.mean(err**2))

    d_out = np.zeros_like(preds)
    d_out[np.arange(n), actions] = 2.0 * err / n
    online.apply_gradients(online.backward_batch(activations, d_out), lr)
    return loss


class GreedyNetPolicy:
    """Greedy action choice from a Q-network, masked to legal actions."""

    deterministic = True

    def __init__(
        self,
        net: Approximator,
        radius: int = 3,
        horizon: int = 12,
        cap: float = 4.0,
        name: str = "dqn",
    ):
        self.net = net
        self.radius = radius
        self.horizon = horizon
        self.cap = cap
        self.name = name

    def encode(self, state: GameState, unit_id: int) -> np.ndarray:
        return encode_local(
            state, unit_id, radius=self.radius, horizon=self.horizon, cap=self.cap
        )

    def __call__(self, state: GameState, unit_id: int) -> Action:
        q = self.net.forward(self.encode(state, unit_id))
        legal = [action_index(a) for a in legal_actions(state, unit_id)]
        best = max(legal, key=lambda a: (q[a], -a))
        return ACTION_SPACE[best]

    def encoder_header(self) -> dict:
        return {"obs": "local", "radius": self.radius, "horizon": self.horizon, "cap": self.cap}

    def save(self, path: str) -> None:
        self.net.save(path, kind="dqn", encoder=self.encoder_header())

    @staticmethod
    def load(path: str) -> "GreedyNetPolicy":
        net, doc = Approximator.load(path)
        enc = doc.get("encoder", {})
        return GreedyNetPolicy(
            net,
            radius=int(enc.get("radius", 3)),
            horizon=int(enc.get("horizon", 12)),
            cap=float(enc.get("cap", 4.0)),
        )


def train_dqn(
    scenario: dict,
    adversary,
    config: TrainConfig,
    learner_faction: str = BLUE,
) -> tuple[GreedyNetPolicy, list[tuple[int, float]]]:
    """Train a Q-network for one faction against a fixed adversary.

    Transitions span the learner's action-selection steps: rewards from
    interleaved adversary steps accumulate into the preceding learner
    transition. Returns (greedy policy, curve) where the curve holds
    (episode_window, mean final score) per 100-episode window.
    """
    n_in = local_length(config.obs_radius)
    net = Approximator([n_in, *config.hidden, len(ACTION_SPACE)], seed=config.seed)
    target = net.clone()
    policy = GreedyNetPolicy(
        net, radius=config.obs_radius, horizon=config.obs_horizon, cap=config.obs_cap
    )
    buffer = ReplayBuffer(config.replay_capacity, seed=config.seed + 1)
    rng = random.Random(config.seed + 2)
    sign = 1 if learner_faction == BLUE else -1

    curve: list[tuple[int, float]] = []
    window_scores: list[int] = []
    steps_taken = 0
    zero_obs = np.zeros(n_in)

    for episode in range(config.episodes):
        state = load_scenario(scenario, seed=config.seed + episode)
        pending = None  # (obs, action, accumulated reward) awaiting next_obs
        while True:
            uid = unit_on_move(state)
            if uid is None:
                if pending is not None:
                    obs, act, rew = pending
                    buffer.add(Transition(obs, act, rew, zero_obs, True))
                break
            if state.units[uid].faction != learner_faction:
                state, r, _ = step(state, uid, adversary(state, uid))
                if pending is not None:
                    pending = (pending[0], pending[1], pending[2] + sign * r)
                continue

            obs = policy.encode(state, uid)
            if pending is not None:
                buffer.add(Transition(pending[0], pending[1], pending[2], obs, False))
                pending = None

            legal = [action_index(a) for a in legal_actions(state, uid)]
            frac = min(1.0, steps_taken / config.eps_decay_steps)
            eps = config.eps_start + (config.eps_end - config.eps_start) * frac
            if rng.random() < eps:
                a = rng.choice(legal)
            else:
                q = net.forward(obs)
                a = max(legal, key=lambda i: (q[i], -i))
            state, r, _ = step(state, uid, ACTION_SPACE[a])
            pending = (obs, a, sign * r)
            steps_taken += 1

            if len(buffer) >= max(config.warmup, config.batch_size) and (
                steps_taken % config.update_every == 0
            ):
                loss = q_update(
                    net, target, buffer.sample(config.batch_size), config.gamma, config.lr
                )
                if not np.isfinite(loss):
                    raise TrainingDiverged(
                        f"non-finite loss at step {steps_taken}, episode {episode}"
                    )
            if steps_taken % config.target_sync == 0:
                target.copy_params_from(net)

        window_scores.append(state.score)
        if len(window_scores) == 100:
            curve.append((episode + 1, sum(window_scores) / 100.0))
            window_scores = []

    return policy, curve
