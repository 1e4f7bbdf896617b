"""Experiment configuration: strict, typed, loadable from YAML.

Every tunable in the library lives in one of the models below.  Files are
key/value with nested sections; unknown keys are a hard error so a typo
cannot silently fall back to a default.
"""

from __future__ import annotations

import os
from typing import Literal, Optional

import yaml
from pydantic import BaseModel, ConfigDict, Field, model_validator


class ConfigError(ValueError):
    """Raised for invalid or inconsistent configuration."""


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid", validate_assignment=True)


class FilterConfig(StrictModel):
    """Smoothing filter attached to an MPPI baseline."""

    kind: Literal["savitzky_golay", "moving_average"] = "savitzky_golay"
    window: int = Field(default=5, ge=1)
    degree: int = Field(default=2, ge=0)
    insertion: Literal["nominal", "noise"] = "nominal"

    @model_validator(mode="after")
    def _check(self) -> "FilterConfig":
        if self.kind == "savitzky_golay":
            if self.window < 3 or self.window % 2 == 0:
                raise ValueError("savitzky_golay window must be odd and >= 3")
            if self.degree >= self.window:
                raise ValueError("savitzky_golay degree must be < window")
        return self


class SolverConfig(StrictModel):
    """Sampling-based solver parameters shared by all controller variants.

    ``noise_cov`` is the diagonal of the sampling covariance: in action
    space for MPPI, in action-rate space for SMPPI.  ``rate_min/max``
    bound the lifted derivative sequence and are required by SMPPI only.
    """

    samples: int = Field(ge=1)
    horizon: int = Field(ge=2)
    dt: float = Field(gt=0.0)
    temperature: float = Field(gt=0.0)
    noise_cov: list[float]
    action_min: list[float]
    action_max: list[float]
    rate_min: Optional[list[float]] = None
    rate_max: Optional[list[float]] = None
    action_cost_weight: Optional[list[float]] = None
    control_cost_scale: float = Field(default=0.0, ge=0.0)
    control_cost_mode: Literal["gamma", "lambda_alpha"] = "gamma"
    control_cost_alpha: float = Field(default=0.0, ge=0.0, lt=1.0)
    seed: int = 0
    filter: Optional[FilterConfig] = None

    @model_validator(mode="after")
    def _check(self) -> "SolverConfig":
        m = len(self.noise_cov)
        if m == 0:
            raise ValueError("noise_cov must have at least one dimension")
        if any(v <= 0.0 for v in self.noise_cov):
            raise ValueError("noise_cov entries must be > 0")
        for name in ("action_min", "action_max", "rate_min", "rate_max", "action_cost_weight"):
            vals = getattr(self, name)
            if vals is not None and len(vals) != m:
                raise ValueError(f"{name} must have length {m} to match noise_cov")
        if any(lo >= hi for lo, hi in zip(self.action_min, self.action_max)):
            raise ValueError("action_min must be < action_max per dimension")
        if (self.rate_min is None) != (self.rate_max is None):
            raise ValueError("rate_min and rate_max must be given together")
        if self.rate_min is not None and any(
            lo >= hi for lo, hi in zip(self.rate_min, self.rate_max)
        ):
            raise ValueError("rate_min must be < rate_max per dimension")
        if self.action_cost_weight is not None and any(w < 0.0 for w in self.action_cost_weight):
            raise ValueError("action_cost_weight entries must be >= 0")
        return self

    @property
    def action_dim(self) -> int:
        return len(self.noise_cov)

    @property
    def control_cost_gamma(self) -> float:
        """Effective scale of the passive-distribution deviation penalty."""
        if self.control_cost_mode == "gamma":
            return self.control_cost_scale
        return self.temperature * (1.0 - self.control_cost_alpha)


class PendulumPlantConfig(StrictModel):
    mass: float = Field(default=1.0, gt=0.0)
    length: float = Field(default=1.0, gt=0.0)
    gravity: float = Field(default=9.81, gt=0.0)
    damping: float = Field(default=0.10, ge=0.0)
    torque_bound: float = Field(default=2.5, gt=0.0)


class BicyclePlantConfig(StrictModel):
    lf: float = Field(default=1.20, gt=0.0)
    lr: float = Field(default=1.45, gt=0.0)
    mass: float = Field(default=1500.0, gt=0.0)
    yaw_inertia: float = Field(default=2500.0, gt=0.0)
    cornering_stiffness_front: float = Field(default=95000.0, gt=0.0)
    cornering_stiffness_rear: float = Field(default=120000.0, gt=0.0)
    friction: float = Field(default=0.9, gt=0.0, le=1.2)
    max_steering: float = Field(default=0.50, gt=0.0)
    drive_force_max: float = Field(default=7000.0, gt=0.0)
    drag_coeff: float = Field(default=1.0, ge=0.0)

    @property
    def wheelbase(self) -> float:
        return self.lf + self.lr


class PendulumCostConfig(StrictModel):
    angle_weight: float = Field(default=5.0, ge=0.0)
    rate_weight: float = Field(default=0.10, ge=0.0)
    terminal_angle_weight: float = Field(default=10.0, ge=0.0)
    terminal_rate_weight: float = Field(default=1.0, ge=0.0)


class VehicleCostConfig(StrictModel):
    lateral_weight: float = Field(default=2.0, ge=0.0)
    speed_weight: float = Field(default=1.0, ge=0.0)
    slip_weight: float = Field(default=20.0, ge=0.0)
    terminal_scale: float = Field(default=2.0, ge=0.0)
    bounds_penalty: float = Field(default=1.0e6, gt=0.0)
    bounds_mode: Literal["penalty", "infinite"] = "penalty"


class TrackConfig(StrictModel):
    kind: Literal["six_corner", "csv"] = "six_corner"
    path: Optional[str] = None
    corner_friction: list[float] = Field(
        default_factory=lambda: [1.0, 0.95, 0.9, 0.85, 0.8, 0.75]
    )
    default_friction: float = Field(default=0.9, gt=0.0, le=1.2)
    half_width: float = Field(default=4.0, gt=0.0)
    waypoint_spacing: float = Field(default=3.0, gt=0.0)

    @model_validator(mode="after")
    def _check(self) -> "TrackConfig":
        if self.kind == "csv" and not self.path:
            raise ValueError("track.kind=csv requires track.path")
        return self


class ModelConfig(StrictModel):
    """Which forward model the controller plans with (the plant is always analytic)."""

    kind: Literal["analytic", "learned"] = "analytic"
    checkpoint: Optional[str] = None

    @model_validator(mode="after")
    def _check(self) -> "ModelConfig":
        if self.kind == "learned" and not self.checkpoint:
            raise ValueError("model.kind=learned requires model.checkpoint")
        return self


class ScenarioConfig(StrictModel):
    task: Literal["pendulum", "vehicle"]
    episode_seconds: float = Field(gt=0.0)
    plant_substeps: int = Field(default=5, ge=1)
    start_state: Optional[list[float]] = None
    reference_speed_kmh: float = Field(default=40.0, gt=0.0)
    laps: int = Field(default=1, ge=1)
    track: TrackConfig = Field(default_factory=TrackConfig)
    pendulum: PendulumPlantConfig = Field(default_factory=PendulumPlantConfig)
    bicycle: BicyclePlantConfig = Field(default_factory=BicyclePlantConfig)
    pendulum_cost: PendulumCostConfig = Field(default_factory=PendulumCostConfig)
    vehicle_cost: VehicleCostConfig = Field(default_factory=VehicleCostConfig)

    @property
    def reference_speed(self) -> float:
        """Reference speed in m/s."""
        return self.reference_speed_kmh / 3.6


class CollectConfig(StrictModel):
    steps: int = Field(ge=1)
    episode_steps: int = Field(default=400, ge=1)
    ou_theta: float = Field(default=4.0, gt=0.0)
    ou_sigma: float = Field(default=1.2, gt=0.0)
    seed: int = 0
    val_fraction: float = Field(default=0.2, ge=0.0, lt=1.0)


class TrainConfig(StrictModel):
    lr: float = Field(default=0.02, gt=0.0)
    batch: int = Field(default=256, ge=1)
    epochs: int = Field(default=200, ge=1)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    hidden: list[int] = Field(default_factory=lambda: [32, 32])
    plateau_patience: int = Field(default=12, ge=1)
    seed: int = 0

    @model_validator(mode="after")
    def _check(self) -> "TrainConfig":
        if any(h < 1 for h in self.hidden):
            raise ValueError("hidden layer sizes must be >= 1")
        return self


CONTROLLER_NAMES = ("mppi", "mppi-sg", "mppi-ma", "smppi")


class ExperimentConfig(StrictModel):
    """Top-level experiment description, one per config file."""

    controller: Literal["mppi", "mppi-sg", "mppi-ma", "smppi"] = "smppi"
    seeds: list[int] = Field(default_factory=lambda: [0])
    output_dir: str = "runs"
    scenario: ScenarioConfig
    solver: SolverConfig
    model: ModelConfig = Field(default_factory=ModelConfig)
    dataset: Optional[str] = None
    collect: Optional[CollectConfig] = None
    train: Optional[TrainConfig] = None

    @model_validator(mode="after")
    def _check(self) -> "ExperimentConfig":
        if not self.seeds:
            raise ValueError("seeds must be non-empty")
        if self.scenario.episode_seconds <= self.solver.horizon * self.solver.dt:
            raise ValueError("episode_seconds must exceed horizon * dt")
        return self


def _resolve_path(base_dir: str, path: str) -> str:
    return path if os.path.isabs(path) else os.path.normpath(os.path.join(base_dir, path))


def load_experiment_config(path: str, overrides: dict | None = None) -> ExperimentConfig:
    """Load and validate a YAML experiment config.

    Relative paths inside the file are resolved against the file's
    directory; referenced input files must exist.  ``overrides`` is a
    flat mapping of top-level keys (e.g. from command-line flags) that
    wins over file values.
    """
    try:
        with open(path) as fh:
            raw = yaml.safe_load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"config file is not valid YAML: {exc}") from exc
    if raw is None:
        raw = {}
    if not isinstance(raw, dict):
        raise ConfigError("config file must contain a mapping at the top level")
    if overrides:
        raw = {**raw, **{k: v for k, v in overrides.items() if v is not None}}
    try:
        cfg = ExperimentConfig.model_validate(raw)
    except Exception as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc

    base = os.path.dirname(os.path.abspath(path))
    if cfg.model.checkpoint:
        cfg.model.checkpoint = _resolve_path(base, cfg.model.checkpoint)
        if not os.path.isfile(cfg.model.checkpoint):
            raise ConfigError(f"model checkpoint not found: {cfg.model.checkpoint}")
    if cfg.dataset:
        cfg.dataset = _resolve_path(base, cfg.dataset)
        if not os.path.isfile(cfg.dataset):
            raise ConfigError(f"dataset not found: {cfg.dataset}")
    if cfg.scenario.track.kind == "csv":
        cfg.scenario.track.path = _resolve_path(base, cfg.scenario.track.path)
        if not os.path.isfile(cfg.scenario.track.path):
            raise ConfigError(f"track file not found: {cfg.scenario.track.path}")
    return cfg
