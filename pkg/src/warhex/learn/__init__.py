"""Learning stack: function approximator, replay, Q-learning, score regression."""

from .config import TrainConfig
from .dqn import GreedyNetPolicy, TrainingDiverged, q_update, train_dqn
from .net import MODEL_SCHEMA, Approximator
from .replay import ReplayBuffer, Transition
from .score import mean_baseline_mse, train_score_model
from .tabular import QTable, StateSpaceOverflow, TabularPolicy, state_key, tabular_q_learn

__all__ = [
    "Approximator",
    "GreedyNetPolicy",
    "MODEL_SCHEMA",
    "QTable",
    "ReplayBuffer",
    "StateSpaceOverflow",
    "TabularPolicy",
    "TrainConfig",
    "TrainingDiverged",
    "Transition",
    "mean_baseline_mse",
    "q_update",
    "state_key",
    "tabular_q_learn",
    "train_dqn",
    "train_score_model",
]
