"""Shared training configuration."""

from __future__ import annotations

from dataclasses import asdict, dataclass


@dataclass
class TrainConfig:
    gamma: float = 0.99
    lr: float = 1e-3
    alpha: float = 0.1  # tabular learning rate
    batch_size: int = 64
    target_sync: int = 1000
    eps_start: float = 1.0
    eps_end: float = 0.05
    eps_decay_steps: int = 50_000
    episodes: int = 0
    seed: int = 0
    hidden: tuple[int, ...] = (128, 128)
    replay_capacity: int = 50_000
    warmup: int = 1000
    update_every: int = 1
    epochs: int = 20  # supervised score-model passes
    obs_radius: int = 3
    obs_horizon: int = 12
    obs_cap: float = 4.0
    global_grid: int = 4
    option_horizon: int = 4

    def __post_init__(self):
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        for name in ("lr", "alpha", "eps_start", "eps_end"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        for name in ("batch_size", "target_sync", "eps_decay_steps",
                     "replay_capacity", "update_every", "epochs", "option_horizon"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.obs_radius >= self.obs_horizon:
            raise ValueError("obs_radius must be < obs_horizon")

    def to_dict(self) -> dict:
        doc = asdict(self)
        doc["hidden"] = list(self.hidden)
        return doc

    @staticmethod
    def from_dict(doc: dict) -> "TrainConfig":
        known = {f for f in TrainConfig.__dataclass_fields__}
        kwargs = {k: v for k, v in doc.items() if k in known}
        if "hidden" in kwargs:
            kwargs["hidden"] = tuple(kwargs["hidden"])
        return TrainConfig(**kwargs)
