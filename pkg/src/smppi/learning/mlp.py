"""Self-contained feed-forward network: tanh hidden layers, identity output.

The network predicts one-step state deltas from normalized features.  No
autograd framework is used; `backprop` returns exact gradients of the
batch MSE so the gradient contract can be checked against finite
differences.  All matrix products go through ``np.einsum``, which keeps
batched evaluation bit-identical to row-by-row evaluation.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field

import numpy as np

from smppi import rng

_STD_FLOOR = 1e-8
CHECKPOINT_VERSION = 1


def _matmul(x: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.einsum("bi,ij->bj", x, w)


@dataclass
class Mlp:
    """Weights, biases, and input/output normalization statistics."""

    layer_sizes: list[int]
    weights: list[np.ndarray]
    biases: list[np.ndarray]
    in_mean: np.ndarray
    in_std: np.ndarray
    out_mean: np.ndarray
    out_std: np.ndarray
    meta: dict = field(default_factory=dict)

    @classmethod
    def initialize(cls, layer_sizes: list[int], seed: int, meta: dict | None = None) -> "Mlp":
        """Random init with 1/sqrt(fan_in) scaling, identity normalization."""
        if len(layer_sizes) < 2 or any(s < 1 for s in layer_sizes):
            raise ValueError(f"bad layer sizes: {layer_sizes}")
        g = rng.generator(seed, rng.stream_id(rng.STREAM_TRAIN_INIT))
        weights, biases = [], []
        for d_in, d_out in zip(layer_sizes[:-1], layer_sizes[1:]):
            weights.append(g.standard_normal((d_in, d_out)) / np.sqrt(d_in))
            biases.append(np.zeros(d_out))
        d0, dn = layer_sizes[0], layer_sizes[-1]
        return cls(
            layer_sizes=list(layer_sizes),
            weights=weights,
            biases=biases,
            in_mean=np.zeros(d0),
            in_std=np.ones(d0),
            out_mean=np.zeros(dn),
            out_std=np.ones(dn),
            meta=dict(meta or {}),
        )

    def set_normalization(self, x: np.ndarray, y: np.ndarray) -> None:
        """Fit per-dimension normalization to a (features, targets) sample."""
        self.in_mean = x.mean(axis=0)
        self.in_std = np.maximum(x.std(axis=0), _STD_FLOOR)
        self.out_mean = y.mean(axis=0)
        self.out_std = np.maximum(y.std(axis=0), _STD_FLOOR)

    def normalize_in(self, x: np.ndarray) -> np.ndarray:
        return (x - self.in_mean) / self.in_std

    def denormalize_out(self, yn: np.ndarray) -> np.ndarray:
        return yn * self.out_std + self.out_mean

    def normalize_out(self, y: np.ndarray) -> np.ndarray:
        return (y - self.out_mean) / self.out_std

    def _forward_normalized(self, xn: np.ndarray) -> tuple[np.ndarray, list[np.ndarray]]:
        """Returns (normalized output, per-layer activations incl. input)."""
        acts = [xn]
        h = xn
        last = len(self.weights) - 1
        for i, (w, b) in enumerate(zip(self.weights, self.biases)):
            z = _matmul(h, w) + b
            h = z if i == last else np.tanh(z)
            acts.append(h)
        return h, acts

    def forward(self, x: np.ndarray) -> np.ndarray:
        """Predicted deltas (denormalized) for raw feature rows (B, d_in)."""
        x = np.asarray(x, dtype=np.float64)
        squeeze = x.ndim == 1
        x = np.atleast_2d(x)
        if x.shape[1] != self.layer_sizes[0]:
            raise ValueError(f"expected {self.layer_sizes[0]} input features, got {x.shape[1]}")
        yn, _ = self._forward_normalized(self.normalize_in(x))
        y = self.denormalize_out(yn)
        return y[0] if squeeze else y

    def loss(self, x: np.ndarray, y: np.ndarray) -> float:
        """Mean squared error on normalized targets."""
        yn_pred, _ = self._forward_normalized(self.normalize_in(x))
        err = yn_pred - self.normalize_out(y)
        return float(np.mean(err**2))

    def backprop(self, x: np.ndarray, y: np.ndarray) -> tuple[float, list[np.ndarray], list[np.ndarray]]:
        """Loss plus exact gradients d(loss)/d(weights), d(loss)/d(biases)."""
        x = np.asarray(x, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        batch = x.shape[0]
        yn_pred, acts = self._forward_normalized(self.normalize_in(x))
        err = yn_pred - self.normalize_out(y)
        loss = float(np.mean(err**2))

        d_out = err.shape[1]
        delta = (2.0 / (batch * d_out)) * err
        grads_w: list[np.ndarray] = [np.empty(0)] * len(self.weights)
        grads_b: list[np.ndarray] = [np.empty(0)] * len(self.biases)
        for i in range(len(self.weights) - 1, -1, -1):
            grads_w[i] = np.einsum("bi,bj->ij", acts[i], delta)
            grads_b[i] = delta.sum(axis=0)
            if i > 0:
                # tanh'(z) expressed through the cached activation.
                delta = _matmul(delta, self.weights[i].T) * (1.0 - acts[i] ** 2)
        return loss, grads_w, grads_b

    def parameter_count(self) -> int:
        return sum(w.size for w in self.weights) + sum(b.size for b in self.biases)


def save_checkpoint(model: Mlp, path: str) -> None:
    """Write a versioned, byte-stable JSON checkpoint."""
    payload = {
        "format_version": CHECKPOINT_VERSION,
        "layer_sizes": model.layer_sizes,
        "weights": [w.tolist() for w in model.weights],
        "biases": [b.tolist() for b in model.biases],
        "in_mean": model.in_mean.tolist(),
        "in_std": model.in_std.tolist(),
        "out_mean": model.out_mean.tolist(),
        "out_std": model.out_std.tolist(),
        "meta": model.meta,
    }
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as fh:
        json.dump(payload, fh, sort_keys=True, separators=(",", ":"))


def load_checkpoint(path: str) -> Mlp:
    with open(path) as fh:
        payload = json.load(fh)
    version = payload.get("format_version")
    if version != CHECKPOINT_VERSION:
        raise ValueError(f"unsupported checkpoint version: {version}")
    return Mlp(
        layer_sizes=list(payload["layer_sizes"]),
        weights=[np.asarray(w, dtype=np.float64) for w in payload["weights"]],
        biases=[np.asarray(b, dtype=np.float64) for b in payload["biases"]],
        in_mean=np.asarray(payload["in_mean"], dtype=np.float64),
        in_std=np.asarray(payload["in_std"], dtype=np.float64),
        out_mean=np.asarray(payload["out_mean"], dtype=np.float64),
        out_std=np.asarray(payload["out_std"], dtype=np.float64),
        meta=dict(payload.get("meta", {})),
    )
