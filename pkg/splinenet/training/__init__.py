"""
Training module
"""
from splinenet.core.dataset import Dataset
from splinenet.training.optimizer import AdaGrad, adagrad_step, adagrad_update
from splinenet.training.trainer import TrainHistory, TrainResult, init, loss, train

__all__ = [
    "Dataset",
    "AdaGrad",
    "adagrad_step",
    "adagrad_update",
    "TrainHistory",
    "TrainResult",
    "init",
    "loss",
    "train",
]
