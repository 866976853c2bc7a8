"""Metric schemas."""

from typing import Dict, List, Literal

from pydantic import BaseModel, Field, NonNegativeInt

METRIC_NAMES = ("acc", "sens", "spec", "ji", "dsc")


class ConfusionCounts(BaseModel):
    """Pixel tallies; positive class is lesion (1)."""

    tp: NonNegativeInt = 0
    tn: NonNegativeInt = 0
    fp: NonNegativeInt = 0
    fn: NonNegativeInt = 0

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            tn=self.tn + other.tn,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
        )


class MetricReport(BaseModel):
    """The five ISIC metrics, each in [0, 1]."""

    acc: float = Field(ge=0.0, le=1.0)
    sens: float = Field(ge=0.0, le=1.0)
    spec: float = Field(ge=0.0, le=1.0)
    ji: float = Field(ge=0.0, le=1.0)
    dsc: float = Field(ge=0.0, le=1.0)
    # names of metrics whose denominator was zero
    degenerate: List[str] = []

    def values(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


class AggregateReport(BaseModel):
    """Dataset-level metrics."""

    mode: Literal["per-image", "global"]
    images: int
    metrics: MetricReport
    # per-metric count of images with a degenerate denominator
    degenerate_counts: Dict[str, int] = {}


class RunSummary(BaseModel):
    """Mean and sample standard deviation of each metric across runs."""

    runs: int
    mean: Dict[str, float]
    std: Dict[str, float]
