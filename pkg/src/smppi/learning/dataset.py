"""Transition datasets and excitation-based collection.

A dataset row is (state, action, next_state - state).  Collection rolls
the plant under Ornstein-Uhlenbeck action noise in bounded episodes with
randomized resets, which spreads the data over the reachable state space
while keeping the action signal smooth enough to resemble closed-loop
operation.  Everything is deterministic under the collection seed.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass
from typing import Callable

import numpy as np

from smppi import rng
from smppi.dynamics.base import DynamicsModel


@dataclass
class TransitionDataset:
    states: np.ndarray   # (N, n)
    actions: np.ndarray  # (N, m)
    deltas: np.ndarray   # (N, n)
    is_val: np.ndarray   # (N,) bool

    def __post_init__(self):
        n = len(self.states)
        if not (len(self.actions) == len(self.deltas) == len(self.is_val) == n):
            raise ValueError("dataset arrays must have equal length")
        for name in ("states", "actions", "deltas"):
            if not np.all(np.isfinite(getattr(self, name))):
                raise ValueError(f"dataset {name} contain non-finite values")

    def __len__(self) -> int:
        return len(self.states)

    @property
    def train_indices(self) -> np.ndarray:
        return np.flatnonzero(~self.is_val)

    @property
    def val_indices(self) -> np.ndarray:
        return np.flatnonzero(self.is_val)

    def to_csv(self, path: str) -> None:
        n = self.states.shape[1]
        m = self.actions.shape[1]
        header = (
            [f"s{i}" for i in range(n)]
            + [f"a{j}" for j in range(m)]
            + [f"d{i}" for i in range(n)]
            + ["split"]
        )
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            for k in range(len(self)):
                row = (
                    [repr(v) for v in self.states[k]]
                    + [repr(v) for v in self.actions[k]]
                    + [repr(v) for v in self.deltas[k]]
                    + ["val" if self.is_val[k] else "train"]
                )
                writer.writerow(row)

    @classmethod
    def from_csv(cls, path: str) -> "TransitionDataset":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            n = sum(1 for h in header if h.startswith("s"))
            m = sum(1 for h in header if h.startswith("a"))
            if header != (
                [f"s{i}" for i in range(n)]
                + [f"a{j}" for j in range(m)]
                + [f"d{i}" for i in range(n)]
                + ["split"]
            ):
                raise ValueError(f"unrecognized dataset header in {path}")
            states, actions, deltas, is_val = [], [], [], []
            for row in reader:
                vals = [float(v) for v in row[:-1]]
                states.append(vals[:n])
                actions.append(vals[n : n + m])
                deltas.append(vals[n + m :])
                is_val.append(row[-1] == "val")
        return cls(
            states=np.asarray(states, dtype=np.float64),
            actions=np.asarray(actions, dtype=np.float64),
            deltas=np.asarray(deltas, dtype=np.float64),
            is_val=np.asarray(is_val, dtype=bool),
        )


def collect_transitions(
    plant: DynamicsModel,
    reset_fn: Callable[[np.random.Generator], np.ndarray],
    action_low: np.ndarray,
    action_high: np.ndarray,
    steps: int,
    episode_steps: int = 400,
    ou_theta: float = 4.0,
    ou_sigma: float = 1.2,
    seed: int = 0,
    val_fraction: float = 0.2,
) -> TransitionDataset:
    """Roll the plant under OU-excited actions and log transitions.

    Episodes restart from ``reset_fn`` every ``episode_steps`` steps or
    when the plant diverges (the rows collected so far are kept).  Whole
    episodes are tagged train or validation so near-duplicate consecutive
    transitions cannot straddle the split.
    """
    if steps < 1:
        raise ValueError("steps must be >= 1, collection would be empty")
    low = np.asarray(action_low, dtype=np.float64)
    high = np.asarray(action_high, dtype=np.float64)
    center = 0.5 * (low + high)
    half = 0.5 * (high - low)
    m = low.shape[0]
    dt = plant.dt

    g = rng.generator(seed, rng.stream_id(rng.STREAM_COLLECT))
    g_split = rng.generator(seed, rng.stream_id(rng.STREAM_COLLECT, 1))

    states, actions, deltas, episode_ids = [], [], [], []
    episode = -1
    collected = 0
    while collected < steps:
        episode += 1
        x = np.asarray(reset_fn(g), dtype=np.float64)
        u = np.zeros(m)  # OU state in normalized [-1, 1] coordinates
        for _ in range(min(episode_steps, steps - collected)):
            u = u + ou_theta * (-u) * dt + ou_sigma * np.sqrt(dt) * g.standard_normal(m)
            u = np.clip(u, -1.0, 1.0)
            a = center + half * u
            x_next, diverged = plant.step_batch(x.reshape(1, -1), a.reshape(1, -1))
            if diverged[0]:
                break
            states.append(x)
            actions.append(a)
            deltas.append(x_next[0] - x)
            episode_ids.append(episode)
            collected += 1
            x = x_next[0]

    episode_ids = np.asarray(episode_ids)
    n_episodes = episode + 1
    val_episode = g_split.random(n_episodes) < val_fraction
    return TransitionDataset(
        states=np.asarray(states),
        actions=np.asarray(actions),
        deltas=np.asarray(deltas),
        is_val=val_episode[episode_ids],
    )
