"""SNP-type convolution neurons.

An SNP-type neuron activates its input *before* the weighted summation:

    ConvSNP:    Y = conv(f(X), W) + b
    MSConvSNP:  Y = sum_i conv(f(X), W_i) + b      (one bias for all branches)

whereas a conventional neuron computes f(conv(X, W) + b).
"""

from typing import List, Sequence, Tuple

import numpy as np

from slpnet.core.errors import ShapeMismatchError
from slpnet.nn.layers import Activation, ActivationKind, Conv2d
from slpnet.nn.module import Module
from slpnet.tensor import ops
from slpnet.tensor.shapes import ConvSpec, Shape4, numel
from slpnet.tensor.tensor import Tensor


class ConvSNP(Module):
    """Single-kernel SNP-type neuron."""

    def __init__(
        self,
        spec: ConvSpec,
        rng: np.random.Generator,
        activation: ActivationKind = "relu",
        prelu_init: float = 0.25,
        dtype=np.float32,
    ):
        super().__init__()
        self.spec = spec
        self.act = self.add_module("act", Activation(activation, prelu_init, dtype))
        self.conv = self.add_module("conv", Conv2d(spec, rng, bias=True, dtype=dtype))

    def forward(self, x: Tensor) -> Tensor:
        return self.conv(self.act(x))

    def flops(self, shape: Shape4) -> Tuple[Shape4, int]:
        _, act_flops = self.act.flops(shape)
        out, conv_flops = self.conv.flops(shape)
        return out, act_flops + conv_flops


def conventional_forward(layer: ConvSNP, x: Tensor) -> Tensor:
    """f(conv(x, W) + b) with the layer's own kernel, bias and activation."""
    return layer.act(layer.conv(x))


class ConvChain(Module):
    """Bias-free convolutions applied in sequence; one MSConvSNP branch."""

    def __init__(
        self,
        specs: Sequence[ConvSpec],
        rng: np.random.Generator,
        names: Sequence[str] = (),
        dtype=np.float32,
    ):
        super().__init__()
        names = list(names) or [f"conv{i}" for i in range(1, len(specs) + 1)]
        if len(names) != len(specs):
            raise ValueError("one name per convolution")
        self.convs: List[Conv2d] = [
            self.add_module(name, Conv2d(spec, rng, bias=False, dtype=dtype)) for name, spec in zip(names, specs)
        ]

    def forward(self, x: Tensor) -> Tensor:
        for conv in self.convs:
            x = conv(x)
        return x

    def flops(self, shape: Shape4) -> Tuple[Shape4, int]:
        total = 0
        for conv in self.convs:
            shape, f = conv.flops(shape)
            total += f
        return shape, total


class MSConvSNP(Module):
    """Multi-branch SNP-type neuron: r kernels over one activated input, one shared bias.

    Branches may have different receptive fields as long as their outputs
    agree in shape. With a single branch this is exactly :class:`ConvSNP`.
    """

    def __init__(
        self,
        branches: Sequence[Module],
        out_channels: int,
        activation: ActivationKind = "relu",
        prelu_init: float = 0.25,
        dtype=np.float32,
    ):
        super().__init__()
        if not branches:
            raise ValueError("MSConvSNP needs at least one branch")
        self.act = self.add_module("act", Activation(activation, prelu_init, dtype))
        self.branches = [self.add_module(f"branch{i}", b) for i, b in enumerate(branches, start=1)]
        self.bias = self.add_param("bias", np.zeros(out_channels, dtype=dtype))

    def forward(self, x: Tensor) -> Tensor:
        a = self.act(x)
        outputs = [branch(a) for branch in self.branches]
        for i, out in enumerate(outputs[1:], start=2):
            if out.shape != outputs[0].shape:
                raise ShapeMismatchError(f"branch{i} output {out.shape} differs from branch1 {outputs[0].shape}")
        return ops.bias_add(ops.add_all(outputs), self.bias)

    def flops(self, shape: Shape4) -> Tuple[Shape4, int]:
        _, total = self.act.flops(shape)
        out_shapes = []
        for branch in self.branches:
            out, f = branch.flops(shape)
            out_shapes.append(out)
            total += f
        if len(set(out_shapes)) != 1:
            raise ShapeMismatchError(f"branch output shapes disagree: {out_shapes}")
        out = out_shapes[0]
        # branch sums plus the single bias add
        total += len(self.branches) * numel(out)
        return out, total
