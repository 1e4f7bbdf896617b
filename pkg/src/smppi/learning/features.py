"""Task feature maps between raw states and network inputs/outputs.

Angle state enters the network as (sin, cos) so the mapping is smooth
across the wrap; pose states the network cannot usefully predict (global
x, y, yaw of the vehicle) are reconstructed kinematically from the
predicted body-frame deltas.
"""

from __future__ import annotations

import numpy as np


class FeatureMap:
    name: str
    input_dim: int
    output_dim: int

    def inputs(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        """Network input rows for (B, n) states and (B, m) actions."""
        raise NotImplementedError

    def targets(self, deltas: np.ndarray) -> np.ndarray:
        """Components of the full-state delta the network predicts."""
        raise NotImplementedError

    def apply_delta(self, states: np.ndarray, pred: np.ndarray, dt: float) -> np.ndarray:
        """Next full states from current states and predicted deltas."""
        raise NotImplementedError


class PendulumFeatures(FeatureMap):
    name = "pendulum"
    input_dim = 4
    output_dim = 2

    def inputs(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        theta = states[:, 0]
        return np.stack([np.sin(theta), np.cos(theta), states[:, 1], actions[:, 0]], axis=1)

    def targets(self, deltas: np.ndarray) -> np.ndarray:
        return deltas[:, :2]

    def apply_delta(self, states: np.ndarray, pred: np.ndarray, dt: float) -> np.ndarray:
        return states + pred


class VehicleFeatures(FeatureMap):
    """Predicts body-frame deltas [dvx, dvy, dr]; integrates pose kinematically."""

    name = "vehicle"
    input_dim = 5
    output_dim = 3

    def inputs(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        return np.stack(
            [states[:, 3], states[:, 4], states[:, 5], actions[:, 0], actions[:, 1]], axis=1
        )

    def targets(self, deltas: np.ndarray) -> np.ndarray:
        return deltas[:, 3:6]

    def apply_delta(self, states: np.ndarray, pred: np.ndarray, dt: float) -> np.ndarray:
        vx_new = np.maximum(states[:, 3] + pred[:, 0], 0.0)
        vy_new = states[:, 4] + pred[:, 1]
        r_new = states[:, 5] + pred[:, 2]
        # Midpoint pose update from the averaged body velocities.
        vx_mid = 0.5 * (states[:, 3] + vx_new)
        vy_mid = 0.5 * (states[:, 4] + vy_new)
        r_mid = 0.5 * (states[:, 5] + r_new)
        yaw_mid = states[:, 2] + 0.5 * r_mid * dt
        x_new = states[:, 0] + (vx_mid * np.cos(yaw_mid) - vy_mid * np.sin(yaw_mid)) * dt
        y_new = states[:, 1] + (vx_mid * np.sin(yaw_mid) + vy_mid * np.cos(yaw_mid)) * dt
        yaw_new = states[:, 2] + r_mid * dt
        return np.stack([x_new, y_new, yaw_new, vx_new, vy_new, r_new], axis=1)


_REGISTRY = {fm.name: fm for fm in (PendulumFeatures(), VehicleFeatures())}


def feature_map_for_task(task: str) -> FeatureMap:
    try:
        return _REGISTRY[task]
    except KeyError:
        raise ValueError(f"no feature map for task {task!r}") from None
