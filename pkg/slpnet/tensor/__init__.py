"""Minimal NCHW tensor algebra with reverse-mode differentiation."""

from slpnet.tensor.ops import (
    activation,
    add,
    add_all,
    bce_loss,
    bias_add,
    concat_channels,
    conv2d,
    dice_loss,
    maxpool2d_2x2,
    prelu,
    relu,
    resize_bilinear,
    sigmoid,
    upsample_bilinear,
)
from slpnet.tensor.shapes import ConvSpec
from slpnet.tensor.tensor import Tape, Tensor, active_tape

__all__ = [
    "ConvSpec",
    "Tape",
    "Tensor",
    "activation",
    "active_tape",
    "add",
    "add_all",
    "bce_loss",
    "bias_add",
    "concat_channels",
    "conv2d",
    "dice_loss",
    "maxpool2d_2x2",
    "prelu",
    "relu",
    "resize_bilinear",
    "sigmoid",
    "upsample_bilinear",
]
