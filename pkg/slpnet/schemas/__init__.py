"""Typed records shared across modules."""

from slpnet.schemas.analysis import AnalysisReport, BenchReport, GradCheckReport, ModuleCost
from slpnet.schemas.data import SplitSpec
from slpnet.schemas.metrics import AggregateReport, ConfusionCounts, MetricReport, RunSummary
from slpnet.schemas.model import ModelConfig
from slpnet.schemas.training import EpochRecord, TrainConfig, TrainReport

__all__ = [
    "AggregateReport",
    "AnalysisReport",
    "BenchReport",
    "ConfusionCounts",
    "EpochRecord",
    "GradCheckReport",
    "MetricReport",
    "ModelConfig",
    "ModuleCost",
    "RunSummary",
    "SplitSpec",
    "TrainConfig",
    "TrainReport",
]
