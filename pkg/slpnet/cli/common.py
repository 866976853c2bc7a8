"""Shared command plumbing: settings from flags, path checks, model and corpus loading."""

import argparse
import logging
from pathlib import Path
from typing import Optional, Union

from pydantic import ValidationError

from slpnet.core.config import Settings, load_settings
from slpnet.core.errors import InvalidConfigError, UnreadablePathError
from slpnet.data.batching import SegmentationDataset, open_corpus
from slpnet.nn.checkpoint import load_checkpoint
from slpnet.nn.model import SLPNet, build
from slpnet.schemas.model import ModelConfig

logger = logging.getLogger(__name__)

# argparse dest -> Settings field
FLAG_SETTINGS = {
    "seed": "SEED",
    "log_level": "LOG_LEVEL",
    "log_file": "LOG_FILE",
    "data_root": "DATA_ROOT",
    "image_dir": "IMAGE_DIR",
    "mask_dir": "MASK_DIR",
    "mask_suffix": "MASK_SUFFIX",
    "size": "IMAGE_SIZE",
    "workers": "NUM_WORKERS",
    "split_train": "SPLIT_TRAIN",
    "split_test": "SPLIT_TEST",
    "train_count": "TRAIN_COUNT",
    "epochs": "EPOCHS",
    "batch": "BATCH_SIZE",
    "lr": "LR",
    "wd": "WEIGHT_DECAY",
    "decoupled_wd": "DECOUPLED_WEIGHT_DECAY",
    "loss": "LOSS",
    "checkpoint_every": "CHECKPOINT_EVERY",
    "eval_every": "EVAL_EVERY",
    "out_dir": "OUT_DIR",
    "threshold": "THRESHOLD",
}


def settings_from_args(args: argparse.Namespace) -> Settings:
    overrides = {field: getattr(args, dest) for dest, field in FLAG_SETTINGS.items() if hasattr(args, dest)}
    return load_settings(getattr(args, "config", None), overrides)


def require_file(path: Union[str, Path], what: str = "file") -> Path:
    path = Path(path)
    if not path.is_file():
        raise UnreadablePathError(f"{what} not found or not a file: {path}")
    return path


def require_dir(path: Union[str, Path], what: str = "directory") -> Path:
    path = Path(path)
    if not path.is_dir():
        raise UnreadablePathError(f"{what} not found or not a directory: {path}")
    return path


def model_config(settings: Settings) -> ModelConfig:
    try:
        return ModelConfig(
            stage_widths=settings.STAGE_WIDTHS,
            dilations=settings.DILATIONS,
            input_size=(settings.IMAGE_SIZE, settings.IMAGE_SIZE),
            seed=settings.SEED,
        )
    except ValidationError as e:
        raise InvalidConfigError("; ".join(err["msg"] for err in e.errors())) from e


def load_model(checkpoint: Optional[str], settings: Settings) -> SLPNet:
    """The checkpointed model, or a fresh one built from settings."""
    if checkpoint:
        return load_checkpoint(require_file(checkpoint, "checkpoint"))
    return build(model_config(settings))


def image_size(settings: Settings, model: SLPNet) -> int:
    """The size asked for explicitly, else the size the model was built or trained at."""
    if "IMAGE_SIZE" in settings.model_fields_set:
        return settings.IMAGE_SIZE
    return model.config.input_size[0]


def open_dataset(settings: Settings, size: Optional[int] = None) -> SegmentationDataset:
    root = require_dir(settings.DATA_ROOT, "data root")
    require_dir(root / settings.IMAGE_DIR, "image directory")
    require_dir(root / settings.MASK_DIR, "mask directory")
    for split_file in (settings.SPLIT_TRAIN, settings.SPLIT_TEST):
        if split_file:
            require_file(split_file, "split file")
    return open_corpus(root, settings.IMAGE_DIR, settings.MASK_DIR, settings.MASK_SUFFIX, size or settings.IMAGE_SIZE)
