"""Forward model backed by a trained delta-prediction network."""

from __future__ import annotations

import numpy as np

from smppi.dynamics.base import DynamicsModel
from smppi.dynamics.bicycle import MAX_SPEED, MAX_YAW_RATE
from smppi.learning.features import FeatureMap, feature_map_for_task
from smppi.learning.mlp import Mlp, load_checkpoint

_STATE_DIMS = {"pendulum": 2, "vehicle": 6}
_ACTION_DIMS = {"pendulum": 1, "vehicle": 2}


class LearnedDynamics(DynamicsModel):
    """Wraps an Mlp delta predictor as a one-step forward model.

    The checkpoint records the feature map and the period it was trained
    at; stepping at a different ``dt`` is refused rather than silently
    extrapolated.
    """

    def __init__(self, model: Mlp, dt: float):
        fm_name = model.meta.get("feature_map")
        if fm_name is None:
            raise ValueError("checkpoint is missing feature_map metadata")
        trained_dt = model.meta.get("dt")
        if trained_dt is not None and abs(trained_dt - dt) > 1e-12:
            raise ValueError(f"model was trained at dt={trained_dt}, requested dt={dt}")
        super().__init__(dt, substeps=1)
        self.model = model
        self.features: FeatureMap = feature_map_for_task(fm_name)
        self.n = _STATE_DIMS[fm_name]
        self.m = _ACTION_DIMS[fm_name]
        self._is_vehicle = fm_name == "vehicle"

    @classmethod
    def from_checkpoint(cls, path: str, dt: float) -> "LearnedDynamics":
        return cls(load_checkpoint(path), dt)

    def step_batch(self, states: np.ndarray, actions: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        states = np.asarray(states, dtype=np.float64)
        actions = np.asarray(actions, dtype=np.float64)
        pred = self.model.forward(self.features.inputs(states, actions))
        nxt = self.features.apply_delta(states, pred, self.dt)
        return nxt, self._diverged(nxt)

    def _diverged(self, states: np.ndarray) -> np.ndarray:
        bad = ~np.all(np.isfinite(states), axis=1)
        if self._is_vehicle:
            with np.errstate(invalid="ignore"):
                bad |= np.hypot(states[:, 3], states[:, 4]) > MAX_SPEED
                bad |= np.abs(states[:, 5]) > MAX_YAW_RATE
        return bad
