"""Trajectory cost terms: task stage/terminal costs, the passive-deviation
control penalty, and the action-rate smoothness penalty.

All functions are pure and batched; sample costs may be +inf (divergence
or hard bounds) but never NaN.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from smppi.config import PendulumCostConfig, VehicleCostConfig
from smppi.track import Track


def wrap_angle(angle):
    """Wrap to (-pi, pi]."""
    wrapped = np.mod(np.asarray(angle, dtype=np.float64) + np.pi, 2.0 * np.pi) - np.pi
    return np.where(wrapped == -np.pi, np.pi, wrapped)


@dataclass
class CostBreakdown:
    """Per-sample decomposition of the rollout cost S_k."""

    state_cost: np.ndarray
    terminal_cost: np.ndarray
    control_cost: np.ndarray
    action_cost: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.state_cost + self.terminal_cost + self.control_cost + self.action_cost


class TaskCost:
    """Stage/terminal cost over batched states."""

    def prepare(self, x0: np.ndarray, reach: float) -> None:
        """Hook called once per solver step with the rollout origin."""

    def stage(self, states: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def terminal(self, states: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class PendulumCost(TaskCost):
    """Swing-up objective: quadratic distance to the upright, at-rest state."""

    def __init__(self, cfg: PendulumCostConfig):
        self.cfg = cfg

    def stage(self, states: np.ndarray) -> np.ndarray:
        err = wrap_angle(states[:, 0] - np.pi)
        return self.cfg.angle_weight * err**2 + self.cfg.rate_weight * states[:, 1] ** 2

    def terminal(self, states: np.ndarray) -> np.ndarray:
        err = wrap_angle(states[:, 0] - np.pi)
        return (
            self.cfg.terminal_angle_weight * err**2
            + self.cfg.terminal_rate_weight * states[:, 1] ** 2
        )


class VehicleCost(TaskCost):
    """Track the centerline at the reference speed with small side-slip.

    Leaving the drivable corridor costs a large finite penalty by
    default, or +inf in ``infinite`` mode (the finite default keeps the
    weight softmax defined when every sample violates).
    """

    def __init__(self, track: Track, cfg: VehicleCostConfig, reference_speed: float):
        self.track = track
        self.cfg = cfg
        self.reference_speed = reference_speed
        self._candidates: np.ndarray | None = None

    def prepare(self, x0: np.ndarray, reach: float) -> None:
        self._candidates = self.track.segments_near(x0[:2], reach)

    def _cost(self, states: np.ndarray, scale: float) -> np.ndarray:
        q = self.track.query(states[:, :2], self._candidates)
        lateral = q["lateral"]
        speed_err = states[:, 3] - self.reference_speed
        slip = np.arctan2(states[:, 4], np.maximum(states[:, 3], 1e-9))
        cost = scale * (
            self.cfg.lateral_weight * lateral**2
            + self.cfg.speed_weight * speed_err**2
            + self.cfg.slip_weight * slip**2
        )
        out_of_bounds = np.abs(lateral) > q["half_width"]
        if self.cfg.bounds_mode == "infinite":
            return np.where(out_of_bounds, np.inf, cost)
        return cost + self.cfg.bounds_penalty * out_of_bounds

    def stage(self, states: np.ndarray) -> np.ndarray:
        return self._cost(states, 1.0)

    def terminal(self, states: np.ndarray) -> np.ndarray:
        return self._cost(states, self.cfg.terminal_scale)


def control_cost(
    nominal: np.ndarray, noise: np.ndarray, noise_cov: np.ndarray, gamma: float
) -> np.ndarray:
    """Deviation-from-passive penalty gamma * sum_t u_t' Sigma^-1 (u_t + eps_t).

    ``nominal`` is (T, m), ``noise`` is (K, T, m); returns (K,).
    """
    inv = 1.0 / np.asarray(noise_cov, dtype=np.float64)
    base = float(np.sum(nominal**2 * inv))
    cross = np.einsum("tm,ktm->k", nominal * inv, noise)
    return gamma * (base + cross)


def action_smoothness_cost(
    actions: np.ndarray, omega: np.ndarray, a_prev: np.ndarray
) -> np.ndarray:
    """Quadratic successive-difference penalty sum_t da_t' Omega da_t.

    The seam term (first row minus the previously executed action) is
    included so rollouts are charged for jumping away from what the
    plant last received.  ``actions`` is (T, m) or (K, T, m).
    """
    actions = np.asarray(actions, dtype=np.float64)
    omega = np.asarray(omega, dtype=np.float64)
    squeeze = actions.ndim == 2
    if squeeze:
        actions = actions[None]
    seam = actions[:, 0, :] - a_prev
    diffs = np.diff(actions, axis=1)
    total = np.einsum("km,m->k", seam**2, omega) + np.einsum("ktm,m->k", diffs**2, omega)
    return total[0] if squeeze else total
