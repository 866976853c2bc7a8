"""Complexity, throughput and gradient-check report schemas."""

from typing import List, Optional, Tuple

from pydantic import BaseModel


class ModuleCost(BaseModel):
    """Parameter and FLOP cost of one top-level module."""

    name: str
    params: int
    flops: int
    output_shape: Tuple[int, int, int, int]


class AnalysisReport(BaseModel):
    input_size: Tuple[int, int]
    modules: List[ModuleCost]
    params: int
    params_mb: float
    flops: int
    gflops: float
    seed: int
    flop_convention: str = "FLOPs count one multiply-add as 2 operations"
    reference_params: int = 200_000
    reference_gflops: float = 2.30

    def module(self, name: str) -> ModuleCost:
        for cost in self.modules:
            if cost.name == name:
                return cost
        raise KeyError(name)


class BenchReport(BaseModel):
    input_size: Tuple[int, int]
    batch: int
    warmup: int
    iters: int
    instances: int = 1
    fps_mean: float
    lat_ms_mean: float
    lat_ms_min: float
    lat_ms_max: float
    params: int
    seed: int
    build_info: str


class GradCheckReport(BaseModel):
    """Reverse-mode versus central-difference comparison."""

    max_rel_error: float
    per_input: List[float]
    tolerance: float
    step: float
    checked: int
    worst_index: Optional[Tuple[int, ...]] = None

    @property
    def passed(self) -> bool:
        return self.max_rel_error < self.tolerance
