from smppi.learning.mlp import Mlp, load_checkpoint, save_checkpoint
from smppi.learning.features import FeatureMap, feature_map_for_task
from smppi.learning.dataset import TransitionDataset, collect_transitions
from smppi.learning.train import TrainingDiverged, TrainResult, train

__all__ = [
    "Mlp",
    "load_checkpoint",
    "save_checkpoint",
    "FeatureMap",
    "feature_map_for_task",
    "TransitionDataset",
    "collect_transitions",
    "TrainingDiverged",
    "TrainResult",
    "train",
]
