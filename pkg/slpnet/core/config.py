"""Configuration settings for SLP-Net runs."""

from pathlib import Path
from typing import Any, Dict, Literal, Optional, Tuple, Union

from dotenv import dotenv_values
from pydantic import ConfigDict, ValidationError, field_validator
from pydantic_settings import BaseSettings

from slpnet import __version__
from slpnet.core.errors import ConfigError, UnreadablePathError


class Settings(BaseSettings):
    """Runtime settings."""

    # Project
    PROJECT_NAME: str = "SLP-Net"
    VERSION: str = __version__
    DEBUG: bool = False

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_FILE: Optional[str] = None

    # Data layout
    DATA_ROOT: str = "data"
    IMAGE_DIR: str = "images"
    MASK_DIR: str = "masks"
    MASK_SUFFIX: str = "_segmentation"
    SPLIT_TRAIN: Optional[str] = None
    SPLIT_TEST: Optional[str] = None
    TRAIN_COUNT: int = 2074
    IMAGE_SIZE: int = 224
    NUM_WORKERS: int = 0

    # Architecture
    STAGE_WIDTHS: Union[str, Tuple[int, ...]] = (16, 32, 64, 128)
    DILATIONS: Union[str, Tuple[int, ...]] = (0, 4, 8, 16)

    # Training
    SEED: int = 0
    OUT_DIR: str = "runs"
    EPOCHS: int = 50
    BATCH_SIZE: int = 20
    LR: float = 1e-3
    WEIGHT_DECAY: float = 1e-4
    DECOUPLED_WEIGHT_DECAY: bool = False
    LOSS: Literal["bce", "bce+dice"] = "bce"
    CHECKPOINT_EVERY: int = 10
    EVAL_EVERY: int = 0
    THRESHOLD: float = 0.5

    @field_validator("STAGE_WIDTHS", "DILATIONS", mode="before")
    @classmethod
    def assemble_int_tuple(cls, v: Union[str, Tuple[int, ...], list]) -> Tuple[int, ...]:
        if isinstance(v, str):
            v = v.strip().strip("()[]")
            return tuple(int(i.strip()) for i in v.split(",") if i.strip())
        elif isinstance(v, (list, tuple)):
            return tuple(int(i) for i in v)
        raise ValueError(v)

    @field_validator("IMAGE_SIZE")
    @classmethod
    def check_image_size(cls, v: int) -> int:
        if v <= 0 or v % 8:
            raise ValueError(f"must be a positive multiple of 8, got {v}")
        return v

    @field_validator("EPOCHS", "BATCH_SIZE", "CHECKPOINT_EVERY")
    @classmethod
    def check_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError(f"must be >= 1, got {v}")
        return v

    model_config = ConfigDict(
        env_file=".env",
        case_sensitive=True,
        extra="ignore",
    )


def read_config_file(path: Union[str, Path]) -> Dict[str, str]:
    """Read a plain ``KEY=value`` file."""
    path = Path(path)
    if not path.is_file():
        raise UnreadablePathError(f"config file not found: {path}")
    return {k: v for k, v in dotenv_values(path).items() if v is not None}


def load_settings(
    config_file: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> Settings:
    """Build settings with precedence flags > config file > environment > defaults.

    ``overrides`` entries whose value is ``None`` are treated as unset.
    """
    values: Dict[str, Any] = {}
    if config_file is not None:
        values.update(read_config_file(config_file))
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})

    try:
        return Settings(**values)
    except ValidationError as e:
        problems = []
        for error in e.errors():
            field = error["loc"][0] if error["loc"] else "unknown"
            problems.append(f"{field}: {error['msg']}")
        raise ConfigError("invalid settings; " + "; ".join(problems)) from e
