"""SLP-Net assembly, parameter accounting and FLOP accounting."""

import logging
from typing import Dict, List, Optional, Tuple

import numpy as np

from slpnet.core.errors import IndivisibleSizeError, ShapeMismatchError
from slpnet.nn.blocks import (
    UPSAMPLE_FLOPS_PER_ELEMENT,
    Head,
    InitBlock,
    SDSBlock,
    SFABlock,
    SLPBlock,
    Upsample,
)
from slpnet.nn.module import Module, ParamStore
from slpnet.schemas.analysis import ModuleCost
from slpnet.schemas.model import ModelConfig
from slpnet.tensor import ops
from slpnet.tensor.shapes import Shape4, concat_shape, numel
from slpnet.tensor.tensor import Tensor

logger = logging.getLogger(__name__)

PYRAMID_LEVELS = 3


class SLPNet(Module):
    """initblock -> (SDS -> SLP) x 3 -> US, with SFA taps on SLP1/SLP2 and a fused 1x1 head.

    The input image is halved three times with bilinear resampling; each
    level is concatenated into the matching SDS block.
    """

    def __init__(self, config: ModelConfig, dtype=np.float32):
        super().__init__()
        self.config = config
        rng = np.random.default_rng(config.seed)
        c0, c1, c2, c3 = config.stage_widths
        img = config.image_channels
        dil = config.dilation_factors

        self.initblock = self.add_module("initblock", InitBlock(img, c0, rng, dtype))
        self.sds1 = self.add_module("sds1", SDSBlock(c0, c1, rng, img, dtype))
        self.slp1 = self.add_module("slp1", SLPBlock(c1, rng, dil, dtype))
        self.sds2 = self.add_module("sds2", SDSBlock(c1, c2, rng, img, dtype))
        self.slp2 = self.add_module("slp2", SLPBlock(c2, rng, dil, dtype))
        self.sds3 = self.add_module("sds3", SDSBlock(c2, c3, rng, img, dtype))
        self.slp3 = self.add_module("slp3", SLPBlock(c3, rng, dil, dtype))
        self.us = self.add_module("us", Upsample(8))
        self.sfa1 = self.add_module("sfa1", SFABlock(c1, 2, rng, config.prelu_init, dtype))
        self.sfa2 = self.add_module("sfa2", SFABlock(c2, 4, rng, config.prelu_init, dtype))
        self.head = self.add_module("head", Head(config.fused_channels, rng, dtype))

    def _check_input(self, shape: Tuple[int, ...]) -> None:
        if len(shape) != 4 or shape[1] != self.config.image_channels:
            raise ShapeMismatchError(
                f"expected an (n, {self.config.image_channels}, H, W) image batch, got {tuple(shape)}"
            )
        h, w = shape[2:]
        if h % 8 or w % 8 or h == 0 or w == 0:
            raise IndivisibleSizeError(f"spatial dims must be positive multiples of 8, got {h}x{w}")

    def pyramid(self, image: Tensor) -> List[Tensor]:
        """The image at 1/2, 1/4 and 1/8 resolution, each level resampled from the previous."""
        levels = []
        level = image
        for _ in range(PYRAMID_LEVELS):
            h, w = level.shape[2:]
            level = ops.resize_bilinear(level, (h // 2, w // 2))
            levels.append(level)
        return levels

    def forward(self, image: Tensor) -> Tensor:
        self._check_input(image.shape)
        img2, img4, img8 = self.pyramid(image)
        x = self.initblock(image)
        s1 = self.slp1(self.sds1(x, img2))
        s2 = self.slp2(self.sds2(s1, img4))
        s3 = self.slp3(self.sds3(s2, img8))
        fused = ops.concat_channels([self.us(s3), self.sfa1(s1), self.sfa2(s2)])
        return self.head(fused)

    def param_store(self) -> ParamStore:
        return ParamStore.from_module(self)

    def module_costs(self, input_size: Optional[Tuple[int, int]] = None, batch: int = 1) -> List[ModuleCost]:
        """Per-module parameter and FLOP table from shapes alone."""
        h, w = input_size or self.config.input_size
        shape: Shape4 = (batch, self.config.image_channels, h, w)
        self._check_input(shape)
        rows: List[ModuleCost] = []

        def row(name: str, out: Shape4, flops: int) -> None:
            params = self._children[name].param_count() if name in self._children else 0
            rows.append(ModuleCost(name=name, params=params, flops=flops, output_shape=tuple(out)))

        levels = []
        level, pyramid_flops = shape, 0
        for _ in range(PYRAMID_LEVELS):
            level = (level[0], level[1], level[2] // 2, level[3] // 2)
            pyramid_flops += UPSAMPLE_FLOPS_PER_ELEMENT * numel(level)
            levels.append(level)
        row("pyramid", levels[-1], pyramid_flops)

        x, f = self.initblock.flops(shape)
        row("initblock", x, f)
        for i, image_shape in enumerate(levels, start=1):
            x, f = self._children[f"sds{i}"].flops(x, image_shape)
            row(f"sds{i}", x, f)
            x, f = self._children[f"slp{i}"].flops(x)
            row(f"slp{i}", x, f)
            if i == 1:
                s1 = x
            elif i == 2:
                s2 = x
        u, f = self.us.flops(x)
        row("us", u, f)
        f1, f = self.sfa1.flops(s1)
        row("sfa1", f1, f)
        f2, f = self.sfa2.flops(s2)
        row("sfa2", f2, f)
        fused = concat_shape([u, f1, f2])
        out, f = self.head.flops(fused)
        row("head", out, f)
        return rows


def build(config: Optional[ModelConfig] = None, seed: Optional[int] = None, dtype=np.float32) -> SLPNet:
    """Build SLP-Net with deterministic initialisation from ``seed`` (or ``config.seed``)."""
    config = config or ModelConfig()
    if seed is not None and seed != config.seed:
        config = config.model_copy(update={"seed": seed})
    model = SLPNet(config, dtype=dtype)
    logger.debug("built SLP-Net with %d parameters (seed %d)", model.param_count(), config.seed)
    return model


def count_params(model: SLPNet) -> Dict[str, int]:
    """Exact parameter count per top-level module, plus ``total``."""
    table = {name: child.param_count() for name, child in model.children()}
    table["total"] = model.param_count()
    return table


def params_mb(params: int) -> float:
    """Parameter storage at 4 bytes per parameter, in MiB."""
    return params * 4 / 2**20


def count_flops(model: SLPNet, input_size: Optional[Tuple[int, int]] = None) -> Dict[str, int]:
    """FLOPs per top-level module at ``input_size`` (2 per multiply-add), plus ``total``."""
    table = {cost.name: cost.flops for cost in model.module_costs(input_size)}
    table["total"] = sum(table.values())
    return table
