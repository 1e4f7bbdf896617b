from smppi.dynamics.base import DivergenceError, DynamicsModel, batch_step
from smppi.dynamics.pendulum import PendulumDynamics
from smppi.dynamics.bicycle import BicycleDynamics
from smppi.dynamics.learned import LearnedDynamics

__all__ = [
    "DivergenceError",
    "DynamicsModel",
    "batch_step",
    "PendulumDynamics",
    "BicycleDynamics",
    "LearnedDynamics",
]
