"""Dynamic bicycle model with friction-limited linear tires.

State [x, y, yaw, vx, vy, r]: position in m, heading in rad, body-frame
longitudinal/lateral velocity in m/s, yaw rate in rad/s.  Action
[steering angle rad, drive command in [-1, 1]].

Lateral tire forces are linear in slip angle and clipped at mu * Fz per
axle; the longitudinal force is a command-proportional drive force minus
quadratic drag, clipped at mu * m * g.  Below ~1 m/s the lateral states
relax toward the kinematic single-track solution instead, which removes
the slip-angle singularity at standstill.  Friction can vary over the
map via ``friction_fn`` (the plant uses the track schedule; a controller
model typically plans with a constant).
"""

from __future__ import annotations

from typing import Callable, Optional

import numpy as np

from smppi.config import BicyclePlantConfig
from smppi.dynamics.base import DynamicsModel

# Blend window for the kinematic fallback, m/s.
_BLEND_LO = 0.6
_BLEND_HI = 1.4
# Relaxation time of the kinematic lateral states, s.
_TAU_KIN = 0.15

MAX_SPEED = 100.0
MAX_YAW_RATE = 10.0


class BicycleDynamics(DynamicsModel):
    n = 6
    m = 2

    def __init__(
        self,
        params: BicyclePlantConfig,
        dt: float,
        substeps: int = 1,
        friction_fn: Optional[Callable[[np.ndarray, np.ndarray], np.ndarray]] = None,
    ):
        super().__init__(dt, substeps)
        self.params = params
        self.friction_fn = friction_fn

    def _clamp_actions(self, actions: np.ndarray) -> np.ndarray:
        out = np.empty_like(actions)
        out[:, 0] = np.clip(actions[:, 0], -self.params.max_steering, self.params.max_steering)
        out[:, 1] = np.clip(actions[:, 1], -1.0, 1.0)
        return out

    def _mu(self, states: np.ndarray) -> np.ndarray:
        if self.friction_fn is None:
            return np.full(states.shape[0], self.params.friction)
        return self.friction_fn(states[:, 0], states[:, 1])

    def _derivatives(self, states: np.ndarray, actions: np.ndarray) -> np.ndarray:
        p = self.params
        yaw = states[:, 2]
        vx = states[:, 3]
        vy = states[:, 4]
        r = states[:, 5]
        steer = actions[:, 0]
        cmd = actions[:, 1]

        mu = self._mu(states)
        g = 9.81
        weight = p.mass * g
        fz_front = weight * p.lr / p.wheelbase
        fz_rear = weight * p.lf / p.wheelbase

        # Dynamic branch: slip angles with a guarded denominator.
        vx_safe = np.maximum(vx, _BLEND_LO)
        alpha_f = steer - np.arctan2(vy + p.lf * r, vx_safe)
        alpha_r = -np.arctan2(vy - p.lr * r, vx_safe)
        fyf = np.clip(p.cornering_stiffness_front * alpha_f, -mu * fz_front, mu * fz_front)
        fyr = np.clip(p.cornering_stiffness_rear * alpha_r, -mu * fz_rear, mu * fz_rear)

        fx = cmd * p.drive_force_max - p.drag_coeff * vx * np.abs(vx)
        fx = np.clip(fx, -mu * weight, mu * weight)

        vx_dot = (fx - fyf * np.sin(steer)) / p.mass + vy * r
        vy_dot_dyn = (fyf * np.cos(steer) + fyr) / p.mass - vx * r
        r_dot_dyn = (p.lf * fyf * np.cos(steer) - p.lr * fyr) / p.yaw_inertia

        # Kinematic branch: lateral states relax to the single-track solution.
        tan_steer = np.tan(steer)
        beta_kin = np.arctan(p.lr * tan_steer / p.wheelbase)
        r_kin = vx * tan_steer * np.cos(beta_kin) / p.wheelbase
        vy_kin = vx * np.tan(beta_kin)
        vy_dot_kin = (vy_kin - vy) / _TAU_KIN
        r_dot_kin = (r_kin - r) / _TAU_KIN

        w = np.clip((vx - _BLEND_LO) / (_BLEND_HI - _BLEND_LO), 0.0, 1.0)
        vy_dot = w * vy_dot_dyn + (1.0 - w) * vy_dot_kin
        r_dot = w * r_dot_dyn + (1.0 - w) * r_dot_kin

        cos_yaw = np.cos(yaw)
        sin_yaw = np.sin(yaw)
        x_dot = vx * cos_yaw - vy * sin_yaw
        y_dot = vx * sin_yaw + vy * cos_yaw

        return np.stack([x_dot, y_dot, r, vx_dot, vy_dot, r_dot], axis=1)

    def _postprocess(self, states: np.ndarray) -> np.ndarray:
        # No reverse gear: braking stops at standstill.
        states[:, 3] = np.maximum(states[:, 3], 0.0)
        return states

    def _diverged(self, states: np.ndarray) -> np.ndarray:
        bad = ~np.all(np.isfinite(states), axis=1)
        with np.errstate(invalid="ignore"):
            speed = np.hypot(states[:, 3], states[:, 4])
            bad |= speed > MAX_SPEED
            bad |= np.abs(states[:, 5]) > MAX_YAW_RATE
        return bad

    @staticmethod
    def slip_angle(states: np.ndarray) -> np.ndarray:
        """Body side-slip beta = atan2(vy, vx); zero at standstill."""
        states = np.atleast_2d(np.asarray(states, dtype=np.float64))
        return np.arctan2(states[:, 4], np.maximum(states[:, 3], 1e-9))
