from slpnet.training.optim import Adam, OptimState, adam_step
from slpnet.training.trainer import (
    compute_loss,
    evaluate,
    evaluate_checkpoints,
    predict_probs,
    train,
    train_runs,
)

__all__ = [
    "Adam",
    "OptimState",
    "adam_step",
    "compute_loss",
    "evaluate",
    "evaluate_checkpoints",
    "predict_probs",
    "train",
    "train_runs",
]
