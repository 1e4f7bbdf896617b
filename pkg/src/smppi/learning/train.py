"""Minibatch SGD with momentum and halve-on-plateau learning rate."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from smppi import rng
from smppi.config import TrainConfig
from smppi.learning.features import FeatureMap
from smppi.learning.dataset import TransitionDataset
from smppi.learning.mlp import Mlp

_MIN_ROWS = 100
_PLATEAU_REL = 1e-3
_LR_FLOOR_FACTOR = 2.0**-10


class TrainingDiverged(RuntimeError):
    """Loss became non-finite; carries the epoch and last finite loss."""


@dataclass
class TrainResult:
    model: Mlp
    train_loss: list[float]
    val_loss: list[float]
    lr_schedule: list[float]

    @property
    def final_train_loss(self) -> float:
        return self.train_loss[-1]

    @property
    def final_val_loss(self) -> float:
        return self.val_loss[-1]


def train(
    dataset: TransitionDataset,
    features: FeatureMap,
    cfg: TrainConfig,
    dt: float,
    task: str | None = None,
) -> TrainResult:
    """Fit an Mlp to one-step deltas; deterministic under ``cfg.seed``.

    Losses are MSE on normalized targets, evaluated at the end of every
    epoch on the full train/validation splits.
    """
    if len(dataset) < _MIN_ROWS:
        raise ValueError(f"need at least {_MIN_ROWS} rows to train, got {len(dataset)}")

    x_all = features.inputs(dataset.states, dataset.actions)
    y_all = features.targets(dataset.deltas)
    tr = dataset.train_indices
    va = dataset.val_indices
    if len(tr) < _MIN_ROWS // 2:
        raise ValueError("train split too small")
    x_tr, y_tr = x_all[tr], y_all[tr]
    x_va, y_va = (x_all[va], y_all[va]) if len(va) else (x_tr, y_tr)

    layer_sizes = [features.input_dim, *cfg.hidden, features.output_dim]
    meta = {"feature_map": features.name, "dt": dt}
    if task is not None:
        meta["task"] = task
    model = Mlp.initialize(layer_sizes, seed=cfg.seed, meta=meta)
    model.set_normalization(x_tr, y_tr)

    vel_w = [np.zeros_like(w) for w in model.weights]
    vel_b = [np.zeros_like(b) for b in model.biases]
    lr = cfg.lr
    lr_floor = cfg.lr * _LR_FLOOR_FACTOR
    best = np.inf
    stall = 0
    train_losses: list[float] = []
    val_losses: list[float] = []
    lrs: list[float] = []

    n_tr = len(x_tr)
    for epoch in range(cfg.epochs):
        g = rng.generator(cfg.seed, rng.stream_id(rng.STREAM_TRAIN_SHUFFLE, epoch))
        order = g.permutation(n_tr)
        for start in range(0, n_tr, cfg.batch):
            idx = order[start : start + cfg.batch]
            loss, gw, gb = model.backprop(x_tr[idx], y_tr[idx])
            if not np.isfinite(loss):
                raise TrainingDiverged(
                    f"non-finite minibatch loss at epoch {epoch} (lr={lr:g}); "
                    "reduce the learning rate or check the dataset"
                )
            for i in range(len(model.weights)):
                vel_w[i] = cfg.momentum * vel_w[i] - lr * gw[i]
                vel_b[i] = cfg.momentum * vel_b[i] - lr * gb[i]
                model.weights[i] = model.weights[i] + vel_w[i]
                model.biases[i] = model.biases[i] + vel_b[i]

        epoch_train = model.loss(x_tr, y_tr)
        epoch_val = model.loss(x_va, y_va)
        if not (np.isfinite(epoch_train) and np.isfinite(epoch_val)):
            raise TrainingDiverged(f"non-finite epoch loss at epoch {epoch} (lr={lr:g})")
        train_losses.append(epoch_train)
        val_losses.append(epoch_val)
        lrs.append(lr)

        if epoch_train < best * (1.0 - _PLATEAU_REL):
            best = epoch_train
            stall = 0
        else:
            stall += 1
            if stall >= cfg.plateau_patience and lr > lr_floor:
                lr = max(lr * 0.5, lr_floor)
                stall = 0

    return TrainResult(model=model, train_loss=train_losses, val_loss=val_losses, lr_schedule=lrs)
