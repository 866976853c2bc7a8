"""Plain convolution and activation layers."""

from typing import Literal, Tuple

import numpy as np

from slpnet.nn.module import Module, kaiming_normal
from slpnet.tensor import ops
from slpnet.tensor.shapes import ConvSpec, Shape4, conv2d_macs, conv2d_shape, numel
from slpnet.tensor.tensor import Tensor

ActivationKind = Literal["relu", "prelu", "identity"]


class Conv2d(Module):
    """Convolution with a Kaiming-initialised kernel and zero bias."""

    def __init__(
        self,
        spec: ConvSpec,
        rng: np.random.Generator,
        bias: bool = True,
        dtype=np.float32,
        init_gain: float = 1.0,
    ):
        super().__init__()
        self.spec = spec
        self.weight = self.add_param("weight", kaiming_normal(rng, spec.weight_shape, dtype, init_gain))
        self.bias = self.add_param("bias", np.zeros(spec.out_channels, dtype=dtype)) if bias else None

    def forward(self, x: Tensor) -> Tensor:
        return ops.conv2d(x, self.weight, self.spec, self.bias)

    def flops(self, shape: Shape4) -> Tuple[Shape4, int]:
        out = conv2d_shape(shape, self.spec)
        total = 2 * conv2d_macs(shape, self.spec)
        if self.bias is not None:
            total += numel(out)
        return out, total


class Activation(Module):
    """relu, prelu (learnable scalar slope, excluded from weight decay) or identity."""

    def __init__(self, kind: ActivationKind = "relu", prelu_init: float = 0.25, dtype=np.float32):
        super().__init__()
        if kind not in ("relu", "prelu", "identity"):
            raise ValueError(f"unknown activation kind {kind!r}")
        self.kind = kind
        self.slope = None
        if kind == "prelu":
            self.slope = self.add_param("slope", np.full(1, prelu_init, dtype=dtype), decay=False)

    def forward(self, x: Tensor) -> Tensor:
        return ops.activation(x, self.kind, self.slope)

    def flops(self, shape: Shape4) -> Tuple[Shape4, int]:
        return tuple(shape), 0 if self.kind == "identity" else numel(shape)
