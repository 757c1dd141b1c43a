"""Multilayer function approximator with exact reverse-mode gradients.

Plain numpy: affine layers, rectifier on hidden layers, identity output.
Forward is deterministic given parameters; initialization is seeded.
"""

from __future__ import annotations

import json

import numpy as np

MODEL_SCHEMA = "warhex-model/1"


class Approximator:
    def __init__(self, layer_sizes: list[int], seed: int = 0):
        if len(layer_sizes) < 2 or any(n < 1 for n in layer_sizes):
            raise ValueError(f"bad layer sizes {layer_sizes}")
        self.layer_sizes = list(layer_sizes)
        rng = np.random.default_rng(seed)
        self.weights: list[np.ndarray] = []
        self.biases: list[np.ndarray] = []
        for n_in, n_out in zip(layer_sizes, layer_sizes[1:]):
            scale = np.sqrt(2.0 / n_in)
            self.weights.append(rng.normal(0.0, scale, size=(n_out, n_in)))
            self.biases.append(np.zeros(n_out))

    @property
    def n_in(self) -> int:
        return self.layer_sizes[0]

    @property
    def n_out(self) -> int:
        return self.layer_sizes[-1]

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.n_in,):
            raise ValueError(f"input shape {x.shape} != ({self.n_in},)")
        a = x
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            a = w @ a + b
            if i < last:
                a = np.maximum(a, 0.0)
        return a

    def forward_batch(self, xs: np.ndarray) -> np.ndarray:
        """Row-per-sample forward pass."""
        return self._forward_cached(xs)[0]

    def _forward_cached(self, xs: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        xs = np.asarray(xs, dtype=float)
        if xs.ndim != 2 or xs.shape[1] != self.n_in:
            raise ValueError(f"batch shape {xs.shape} incompatible with n_in={self.n_in}")
        activations = [xs]
        a = xs
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            a = a @ w.T + b
            if i < last:
                a = np.maximum(a, 0.0)
            activations.append(a)
        return a, activations

    def backward_batch(
        self, activations: list[np.ndarray], d_out: np.ndarray
    ) -> list[tuple[np.ndarray, np.ndarray]]:
        """Gradients of sum_i d_out[i] . y[i] w.r.t. every weight and bias."""
        grads: list[tuple[np.ndarray, np.ndarray]] = [None] * len(self.weights)
        delta = np.asarray(d_out, dtype=float)
        for i in range(len(self.weights) - 1, -1, -1):
            a_prev = activations[i]
            grads[i] = (delta.T @ a_prev, delta.sum(axis=0))
            if i > 0:
                delta = (delta @ self.weights[i]) * (activations[i] > 0.0)
        return grads

    def gradient(
        self, x: np.ndarray, upstream: np.ndarray
    ) -> list[tuple[np.ndarray, np.ndarray]]:
        """Exact gradients of y . upstream w.r.t. all parameters."""
        upstream = np.asarray(upstream, dtype=float)
        if upstream.shape != (self.n_out,):
            raise ValueError(f"upstream shape {upstream.shape} != ({self.n_out},)")
        _, activations = self._forward_cached(np.asarray(x, dtype=float)[None, :])
        return self.backward_batch(activations, upstream[None, :])

    def apply_gradients(
        self, grads: list[tuple[np.ndarray, np.ndarray]], lr: float
    ) -> None:
        for i, (dw, db) in enumerate(grads):
            self.weights[i] -= lr * dw
            self.biases[i] -= lr * db

    # -- parameter plumbing -------------------------------------------------

    def get_flat_params(self) -> np.ndarray:
        parts = []
        for w, b in zip(self.weights, self.biases):
            parts.append(w.reshape(-1))
            parts.append(b)
        return np.concatenate(parts)

    def set_flat_params(self, flat: np.ndarray) -> None:
        flat = np.asarray(flat, dtype=float)
        k = 0
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            self.weights[i] = flat[k : k + w.size].reshape(w.shape).copy()
            k += w.size
            self.biases[i] = flat[k : k + b.size].copy()
            k += b.size
        if k != flat.size:
            raise ValueError(f"parameter vector length {flat.size}, expected {k}")

    def clone(self) -> "Approximator":
        dup = Approximator(self.layer_sizes, seed=0)
        dup.weights = [w.copy() for w in self.weights]
        dup.biases = [b.copy() for b in self.biases]
        return dup

    def copy_params_from(self, other: "Approximator") -> None:
        self.weights = [w.copy() for w in other.weights]
        self.biases = [b.copy() for b in other.biases]

    # -- serialization ------------------------------------------------------

    def to_dict(self, kind: str = "net", encoder: dict | None = None) -> dict:
        return {
            "schema": MODEL_SCHEMA,
            "kind": kind,
            "layer_sizes": self.layer_sizes,
            "encoder": encoder or {},
            "params": [
                {"w": w.reshape(-1).tolist(), "b": b.tolist()}
                for w, b in zip(self.weights, self.biases)
            ],
        }

    @staticmethod
    def from_dict(doc: dict) -> "Approximator":
        if doc.get("schema") != MODEL_SCHEMA:
            raise ValueError(f"not a model file (schema {doc.get('schema')!r})")
        net = Approximator(doc["layer_sizes"], seed=0)
        for i, layer in enumerate(doc["params"]):
            net.weights[i] = np.array(layer["w"], dtype=float).reshape(net.weights[i].shape)
            net.biases[i] = np.array(layer["b"], dtype=float)
        return net

    def save(self, path: str, kind: str = "net", encoder: dict | None = None) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(kind=kind, encoder=encoder), fh)

    @staticmethod
    def load(path: str) -> tuple["Approximator", dict]:
        """Load a model file; returns (net, header doc)."""
        with open(path) as fh:
            doc = json.load(fh)
        return Approximator.from_dict(doc), doc
