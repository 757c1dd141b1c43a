"""Supervised regression of final game score from the global abstraction."""

from __future__ import annotations

import random

import numpy as np

from ..engine import EpisodeLog, state_from_snapshot
from ..observation import encode_global, global_length
from .config import TrainConfig
from .net import Approximator

MIN_EPISODES = 100


def dataset_from_logs(logs: list[EpisodeLog], grid: int) -> list[tuple[np.ndarray, float]]:
    """One (abstraction, final_score) sample per logged pre-action state."""
    samples = []
    for log in logs:
        y = float(log.final_score)
        for rec in log.records:
            state = state_from_snapshot(log.scenario, rec.snapshot)
            samples.append((encode_global(state, grid=grid), y))
    return samples


def _mse(net: Approximator, xs: np.ndarray, ys: np.ndarray) -> float:
    preds = net.forward_batch(xs)[:, 0]
    return float(np.mean((preds - ys) ** 2))


def train_score_model(
    logs: list[EpisodeLog],
    config: TrainConfig,
    behavior_name: str = "",
    adversary_name: str = "",
):
    """Fit a score predictor on episode logs; 80/20 split by episode.

    Returns (ScorePredictor, curve) with curve rows (epoch, held-out MSE).
    Refuses datasets of fewer than 100 episodes.
    """
    # Predictor type lives with the arbitration framework; import here to
    # keep that package independent of the training code.
    from ..multimodel import ScorePredictor

    if len(logs) < MIN_EPISODES:
        raise ValueError(f"need at least {MIN_EPISODES} episodes, got {len(logs)}")

    rng = random.Random(config.seed)
    order = list(range(len(logs)))
    rng.shuffle(order)
    cut = max(1, int(len(order) * 0.8))
    train_logs = [logs[i] for i in order[:cut]]
    test_logs = [logs[i] for i in order[cut:]]

    grid = config.global_grid
    train = dataset_from_logs(train_logs, grid)
    test = dataset_from_logs(test_logs, grid)
    xs = np.stack([s[0] for s in train])
    ys = np.array([s[1] for s in train])
    txs = np.stack([s[0] for s in test])
    tys = np.array([s[1] for s in test])

    net = Approximator([global_length(grid), *config.hidden, 1], seed=config.seed)
    curve: list[tuple[int, float]] = []
    n = len(train)
    for epoch in range(1, config.epochs + 1):
        perm = list(range(n))
        rng.shuffle(perm)
        for lo in range(0, n, config.batch_size):
            idx = perm[lo : lo + config.batch_size]
            bx, by = xs[idx], ys[idx]
            preds, activations = net._forward_cached(bx)
            err = preds[:, 0] - by
            d_out = (2.0 * err / len(idx))[:, None]
            net.apply_gradients(net.backward_batch(activations, d_out), config.lr)
        curve.append((epoch, _mse(net, txs, tys)))

    predictor = ScorePredictor(
        behavior_name=behavior_name,
        adversary_name=adversary_name,
        net=net,
        grid=grid,
    )
    return predictor, curve


def mean_baseline_mse(logs: list[EpisodeLog]) -> float:
    """Held-out-free reference: MSE of the constant mean-score predictor."""
    ys = np.array([float(log.final_score) for log in logs for _ in log.records])
    return float(np.mean((ys - ys.mean()) ** 2))
