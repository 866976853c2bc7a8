"""SLP-Net building blocks: initblock, SDS, SLP, SFA and the US head."""

from typing import Sequence, Tuple

import numpy as np

from slpnet.core.errors import InvalidConfigError, OddSpatialError, ShapeMismatchError
from slpnet.nn.layers import Activation, Conv2d
from slpnet.nn.module import Module
from slpnet.nn.snp import ConvChain, ConvSNP, MSConvSNP
from slpnet.tensor import ops
from slpnet.tensor.shapes import (
    ConvSpec,
    Shape4,
    concat_shape,
    maxpool2x2_shape,
    numel,
    upsample_shape,
)
from slpnet.tensor.tensor import Tensor

# bilinear interpolation: 4 multiply-adds per output element
UPSAMPLE_FLOPS_PER_ELEMENT = 8
POOL_FLOPS_PER_ELEMENT = 3
# keeps the initial prediction near 0.5 whatever the fused feature scale
HEAD_INIT_GAIN = 0.01


class InitBlock(Module):
    """Three 3x3 stride-1 convolutions, each followed by ReLU."""

    def __init__(self, in_channels: int, out_channels: int, rng: np.random.Generator, dtype=np.float32):
        super().__init__()
        self.in_channels = in_channels
        widths = [in_channels, out_channels, out_channels, out_channels]
        self.convs = [
            self.add_module(f"conv{i}", Conv2d(ConvSpec.same(c_in, c_out, 3), rng, dtype=dtype))
            for i, (c_in, c_out) in enumerate(zip(widths, widths[1:]), start=1)
        ]

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 4 or x.shape[1] != self.in_channels:
            raise ShapeMismatchError(f"initblock expects {self.in_channels} input channels, got shape {x.shape}")
        for conv in self.convs:
            x = ops.relu(conv(x))
        return x

    def flops(self, shape: Shape4) -> Tuple[Shape4, int]:
        total = 0
        for conv in self.convs:
            shape, f = conv.flops(shape)
            total += f + numel(shape)
        return shape, total


class SDSBlock(Module):
    """SNP-type downsampling: concat(relu(conv3x3/2(x)), maxpool2x2(x), image).

    The conv branch emits ``out_channels - in_channels - image_channels``
    channels so the concatenation has exactly ``out_channels``.
    """

    def __init__(
        self,
        in_channels: int,
        out_channels: int,
        rng: np.random.Generator,
        image_channels: int = 3,
        dtype=np.float32,
    ):
        super().__init__()
        conv_channels = out_channels - in_channels - image_channels
        if conv_channels < 1:
            raise InvalidConfigError(
                f"SDS {in_channels}->{out_channels} with {image_channels} image channels leaves no conv channels"
            )
        self.in_channels = in_channels
        self.out_channels = out_channels
        self.image_channels = image_channels
        self.conv_channels = conv_channels
        spec = ConvSpec(conv_channels, in_channels, kernel=3, stride=2, padding=1)
        self.conv = self.add_module("conv", Conv2d(spec, rng, dtype=dtype))

    def _check(self, shape: Shape4, image_shape: Shape4) -> None:
        n, c, h, w = shape
        if h % 2 or w % 2:
            raise OddSpatialError(f"SDS needs even spatial dims, got {h}x{w}")
        if c != self.in_channels:
            raise ShapeMismatchError(f"SDS expects {self.in_channels} channels, got {c}")
        expected = (n, self.image_channels, h // 2, w // 2)
        if tuple(image_shape) != expected:
            raise ShapeMismatchError(f"SDS image must be {expected}, got {tuple(image_shape)}")

    def forward(self, x: Tensor, image: Tensor) -> Tensor:
        self._check(x.shape, image.shape)
        return ops.concat_channels([ops.relu(self.conv(x)), ops.maxpool2d_2x2(x), image])

    def flops(self, shape: Shape4, image_shape: Shape4) -> Tuple[Shape4, int]:
        self._check(shape, image_shape)
        conv_out, total = self.conv.flops(shape)
        pooled = maxpool2x2_shape(shape)
        total += numel(conv_out) + POOL_FLOPS_PER_ELEMENT * numel(pooled)
        return concat_shape([conv_out, pooled, image_shape]), total


class SLPBlock(Module):
    """SNP-type lightweight pyramid.

    y = x + pw(dw(x)), where dw is a four-branch MSConvSNP whose branch i is a
    grouped 3x1 conv (2N -> N, dilation (d_i, 1)) followed by a grouped 1x3
    conv (N -> 2N, dilation (1, d_i)), and pw is a 1x1 ConvSNP 2N -> 2N.
    Both neurons use ReLU.
    """

    def __init__(
        self,
        channels: int,
        rng: np.random.Generator,
        dilations: Sequence[int] = (1, 5, 9, 17),
        dtype=np.float32,
    ):
        super().__init__()
        if channels % 2 or channels < 2:
            raise InvalidConfigError(f"SLP needs an even channel count, got {channels}")
        half = channels // 2
        self.channels = channels
        self.dilations = tuple(dilations)
        branches = [
            ConvChain(
                [
                    ConvSpec.same(channels, half, (3, 1), dilation=(d, 1), groups=half),
                    ConvSpec.same(half, channels, (1, 3), dilation=(1, d), groups=half),
                ],
                rng,
                names=("k31", "k13"),
                dtype=dtype,
            )
            for d in self.dilations
        ]
        self.dw = self.add_module("dw", MSConvSNP(branches, channels, activation="relu", dtype=dtype))
        self.pw = self.add_module("pw", ConvSNP(ConvSpec.same(channels, channels, 1), rng, "relu", dtype=dtype))

    def forward(self, x: Tensor) -> Tensor:
        if x.shape[1] != self.channels:
            raise ShapeMismatchError(f"SLP expects {self.channels} channels, got {x.shape[1]}")
        return ops.add(x, self.pw(self.dw(x)))

    def flops(self, shape: Shape4) -> Tuple[Shape4, int]:
        mid, dw_flops = self.dw.flops(shape)
        out, pw_flops = self.pw.flops(mid)
        return out, dw_flops + pw_flops + numel(out)


class SFABlock(Module):
    """SNP-type feature self-adaptation.

    upsample(concat(psi3(prelu(x)), psi1(prelu(x)))) with psi3 a 3x3 conv and
    psi1 a 1x1 conv, each 2N -> N; one learnable PReLU slope per block.
    """

    def __init__(
        self,
        channels: int,
        scale: int,
        rng: np.random.Generator,
        prelu_init: float = 0.25,
        dtype=np.float32,
    ):
        super().__init__()
        if channels % 2 or channels < 2:
            raise InvalidConfigError(f"SFA needs an even channel count, got {channels}")
        upsample_shape((1, 1, 1, 1), scale)
        half = channels // 2
        self.channels = channels
        self.scale = scale
        self.act = self.add_module("act", Activation("prelu", prelu_init, dtype))
        self.psi3 = self.add_module("psi3", Conv2d(ConvSpec.same(channels, half, 3), rng, dtype=dtype))
        self.psi1 = self.add_module("psi1", Conv2d(ConvSpec.same(channels, half, 1), rng, dtype=dtype))

    def forward(self, x: Tensor) -> Tensor:
        if x.shape[1] != self.channels:
            raise ShapeMismatchError(f"SFA expects {self.channels} channels, got {x.shape[1]}")
        a = self.act(x)
        return ops.upsample_bilinear(ops.concat_channels([self.psi3(a), self.psi1(a)]), self.scale)

    def flops(self, shape: Shape4) -> Tuple[Shape4, int]:
        _, total = self.act.flops(shape)
        out3, f3 = self.psi3.flops(shape)
        out1, f1 = self.psi1.flops(shape)
        out = upsample_shape(concat_shape([out3, out1]), self.scale)
        return out, total + f3 + f1 + UPSAMPLE_FLOPS_PER_ELEMENT * numel(out)


class Upsample(Module):
    """US: parameter-free bilinear upsampling of the deepest feature map."""

    def __init__(self, scale: int = 8):
        super().__init__()
        upsample_shape((1, 1, 1, 1), scale)
        self.scale = scale

    def forward(self, x: Tensor) -> Tensor:
        return ops.upsample_bilinear(x, self.scale)

    def flops(self, shape: Shape4) -> Tuple[Shape4, int]:
        out = upsample_shape(shape, self.scale)
        return out, UPSAMPLE_FLOPS_PER_ELEMENT * numel(out)


class Head(Module):
    """1x1 projection of the fused features to one channel, then sigmoid."""

    def __init__(self, in_channels: int, rng: np.random.Generator, dtype=np.float32):
        super().__init__()
        spec = ConvSpec.same(in_channels, 1, 1)
        self.conv = self.add_module("conv", Conv2d(spec, rng, dtype=dtype, init_gain=HEAD_INIT_GAIN))

    def forward(self, x: Tensor) -> Tensor:
        return ops.sigmoid(self.conv(x))

    def flops(self, shape: Shape4) -> Tuple[Shape4, int]:
        out, total = self.conv.flops(shape)
        return out, total + numel(out)
