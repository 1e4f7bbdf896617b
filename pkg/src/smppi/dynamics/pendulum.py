"""Torque-limited pendulum, angle measured from the hanging equilibrium.

State [theta, omega] in rad, rad/s; action [torque] in N*m.  Angles are
kept unwrapped here; wrapping is the cost function's concern.
"""

from __future__ import annotations

import numpy as np

from smppi.config import PendulumPlantConfig
from smppi.dynamics.base import DynamicsModel


class PendulumDynamics(DynamicsModel):
    n = 2
    m = 1

    def __init__(self, params: PendulumPlantConfig, dt: float, substeps: int = 1):
        super().__init__(dt, substeps)
        self.params = params
        self._inertia = params.mass * params.length**2
        self._mgl = params.mass * params.gravity * params.length

    def _clamp_actions(self, actions: np.ndarray) -> np.ndarray:
        b = self.params.torque_bound
        return np.clip(actions, -b, b)

    def _derivatives(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        theta = states[:, 0]
        omega = states[:, 1]
        torque = actions[:, 0]
        alpha = (torque - self.params.damping * omega - self._mgl * np.sin(theta)) / self._inertia
        return np.stack([omega, alpha], axis=1)

    def energy(self, states: np.ndarray) -> np.ndarray:
        """Total mechanical energy, zero at the hanging rest state."""
        states = np.atleast_2d(np.asarray(states, dtype=np.float64))
        kinetic = 0.5 * self._inertia * states[:, 1] ** 2
        potential = self._mgl * (1.0 - np.cos(states[:, 0]))
        return kinetic + potential
