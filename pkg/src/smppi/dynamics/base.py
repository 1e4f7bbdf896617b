"""Discrete-time forward models with a batched evaluation contract.

Models advance ``(state, action)`` by one controller period ``dt``.  The
batched form is the primitive: ``step_batch`` maps (K, n) states and
(K, m) actions to (K, n) next states plus a per-sample divergence mask,
using only elementwise/batch-stable operations so that evaluating K rows
at once is bit-identical to evaluating them one at a time.
"""

from __future__ import annotations

import numpy as np


class DivergenceError(RuntimeError):
    """A state left the model's validity envelope."""


class DynamicsModel:
    """Base class for forward models.

    Subclasses set ``n`` (state dim), ``m`` (action dim), ``dt``, and
    implement ``_derivatives`` or override ``step_batch`` outright.
    ``substeps`` splits ``dt`` into equal RK4 sub-intervals; plants use
    a finer grid than the controller's internal model.
    """

    n: int
    m: int

    def __init__(self, dt: float, substeps: int = 1):
        if dt <= 0.0:
            raise ValueError("dt must be > 0")
        if substeps < 1:
            raise ValueError("substeps must be >= 1")
        self.dt = float(dt)
        self.substeps = int(substeps)

    def _derivatives(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _diverged(self, states: np.ndarray) -> np.ndarray:
        """Per-row divergence mask; default flags non-finite states."""
        return ~np.all(np.isfinite(states), axis=1)

    def _rk4(self, states: np.ndarray, actions: np.ndarray, h: float) -> np.ndarray:
        k1 = self._derivatives(states, actions)
        k2 = self._derivatives(states + (0.5 * h) * k1, actions)
        k3 = self._derivatives(states + (0.5 * h) * k2, actions)
        k4 = self._derivatives(states + h * k3, actions)
        return states + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

    def step_batch(self, states: np.ndarray, actions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Advance K rows by one period; returns (next_states, diverged)."""
        states = np.asarray(states, dtype=np.float64)
        actions = np.asarray(actions, dtype=np.float64)
        if states.ndim != 2 or states.shape[1] != self.n:
            raise ValueError(f"states must have shape (K, {self.n})")
        if actions.ndim != 2 or actions.shape != (states.shape[0], self.m):
            raise ValueError(f"actions must have shape (K, {self.m})")
        actions = self._clamp_actions(actions)
        h = self.dt / self.substeps
        out = states
        for _ in range(self.substeps):
            out = self._rk4(out, actions, h)
        out = self._postprocess(out)
        return out, self._diverged(out)

    def _clamp_actions(self, actions: np.ndarray) -> np.ndarray:
        return actions

    def _postprocess(self, states: np.ndarray) -> np.ndarray:
        return states

    def step(self, state: np.ndarray, action: np.ndarray) -> np.ndarray:
        """Single-sample step; raises ``DivergenceError`` instead of masking."""
        state = np.asarray(state, dtype=np.float64)
        action = np.asarray(action, dtype=np.float64)
        if not (np.all(np.isfinite(state)) and np.all(np.isfinite(action))):
            raise ValueError("state and action must be finite")
        nxt, div = self.step_batch(state.reshape(1, -1), action.reshape(1, -1))
        if div[0]:
            raise DivergenceError(f"state diverged: {nxt[0]}")
        return nxt[0]


def batch_step(model: DynamicsModel, states: np.ndarray, actions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Functional alias for ``model.step_batch`` (parallel-rollout entry point)."""
    return model.step_batch(states, actions)
