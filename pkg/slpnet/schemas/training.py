"""Training schemas."""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field, model_validator

from slpnet.schemas.metrics import AggregateReport


class TrainConfig(BaseModel):
    """Optimisation recipe; defaults follow the published training setup."""

    epochs: int = Field(default=50, ge=1)
    batch_size: int = Field(default=20, ge=1)
    lr: float = Field(default=1e-3, gt=0.0)
    weight_decay: float = Field(default=1e-4, ge=0.0)
    decoupled_weight_decay: bool = False
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    loss: Literal["bce", "bce+dice"] = "bce"
    seed: int = 0
    checkpoint_every: int = Field(default=10, ge=1)
    eval_every: int = Field(default=0, ge=0)
    num_workers: int = Field(default=0, ge=0)
    augment: bool = True
    threshold: float = 0.5
    # evaluate the un-augmented training split after the last epoch
    final_eval: bool = True


class EpochRecord(BaseModel):
    epoch: int
    mean_loss: float
    steps: int
    wall_time: float
    metrics: Optional[AggregateReport] = None


class TrainReport(BaseModel):
    """Outcome of one training run."""

    seed: int
    epochs: List[EpochRecord] = []
    steps: int = 0
    checkpoint_path: Optional[str] = None
    checkpoints: List[str] = []
    train_metrics: Optional[AggregateReport] = None
    notes: List[str] = []

    @model_validator(mode="after")
    def check_contiguous(self) -> "TrainReport":
        for i, record in enumerate(self.epochs, start=1):
            if record.epoch != i:
                raise ValueError(f"epoch records must run 1..n contiguously, got {record.epoch} at {i}")
        return self
