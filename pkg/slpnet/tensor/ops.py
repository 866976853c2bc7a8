"""Differentiable NCHW operations.

Exactly the operation set the network needs. Every op computes in the dtype
of its inputs (float32 for training, float64 for gradient checks) and records
itself on the active tape when any input requires a gradient.
"""

from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from slpnet.core.errors import NonBinaryTargetError, ShapeMismatchError
from slpnet.tensor.shapes import (
    ConvSpec,
    concat_shape,
    conv2d_shape,
    maxpool2x2_shape,
    upsample_shape,
)
from slpnet.tensor.tensor import Tensor, active_tape

BCE_EPS = 1e-7


def _result(
    op: str,
    inputs: Sequence[Tensor],
    data: np.ndarray,
    backward: Callable[[np.ndarray], Sequence[Optional[np.ndarray]]],
) -> Tensor:
    out = Tensor(data)
    tape = active_tape()
    if tape is not None and any(t.requires_grad for t in inputs):
        tape.record(op, inputs, out, backward)
    return out


# ---------------------------------------------------------------------------
# convolution


def _tap_window(spec: ConvSpec, out_hw: Tuple[int, int], i: int, j: int) -> Tuple[slice, slice]:
    (sh, sw), (dh, dw) = spec.stride, spec.dilation
    oh, ow = out_hw
    h0, w0 = i * dh, j * dw
    return slice(h0, h0 + sh * (oh - 1) + 1, sh), slice(w0, w0 + sw * (ow - 1) + 1, sw)


def _im2col(xp: np.ndarray, spec: ConvSpec, out_hw: Tuple[int, int]) -> np.ndarray:
    n, c = xp.shape[:2]
    kh, kw = spec.kernel
    cols = np.empty((n, c, kh * kw, *out_hw), dtype=xp.dtype)
    for i in range(kh):
        for j in range(kw):
            hs, ws = _tap_window(spec, out_hw, i, j)
            cols[:, :, i * kw + j] = xp[:, :, hs, ws]
    return cols


def _col2im(gcols: np.ndarray, padded_shape: Tuple[int, ...], spec: ConvSpec, out_hw: Tuple[int, int]) -> np.ndarray:
    kh, kw = spec.kernel
    gxp = np.zeros(padded_shape, dtype=gcols.dtype)
    for i in range(kh):
        for j in range(kw):
            hs, ws = _tap_window(spec, out_hw, i, j)
            gxp[:, :, hs, ws] += gcols[:, :, i * kw + j]
    return gxp


def conv2d(x: Tensor, weight: Tensor, spec: ConvSpec, bias: Optional[Tensor] = None) -> Tensor:
    """Grouped, strided, dilated 2-D cross-correlation with zero padding."""
    if weight.shape != spec.weight_shape:
        raise ShapeMismatchError(f"kernel shape {weight.shape} does not match spec {spec.weight_shape}")
    if bias is not None and bias.shape != (spec.out_channels,):
        raise ShapeMismatchError(f"bias shape {bias.shape} does not match {spec.out_channels} output channels")
    n, c, h, w = x.shape
    out_shape = conv2d_shape(x.shape, spec)
    out_hw = out_shape[2:]
    g, cpg = spec.groups, spec.in_channels_per_group
    opg = spec.out_channels // g
    kk = spec.kernel[0] * spec.kernel[1]
    ph, pw = spec.padding
    length = out_hw[0] * out_hw[1]

    xp = np.pad(x.data, ((0, 0), (0, 0), (ph, ph), (pw, pw))) if ph or pw else x.data
    cols = _im2col(xp, spec, out_hw).reshape(n, g, cpg * kk, length)
    wmat = weight.data.reshape(g, opg, cpg * kk)
    y = np.matmul(wmat[None], cols).reshape(out_shape)
    if bias is not None:
        y += bias.data.reshape(1, -1, 1, 1)

    inputs = (x, weight) if bias is None else (x, weight, bias)

    def backward(gy: np.ndarray):
        gmat = gy.reshape(n, g, opg, length)
        gx = gw = gb = None
        if x.requires_grad:
            gcols = np.matmul(wmat.transpose(0, 2, 1)[None], gmat).reshape(n, c, kk, *out_hw)
            gxp = _col2im(gcols, xp.shape, spec, out_hw)
            gx = gxp[:, :, ph : ph + h, pw : pw + w]
        if weight.requires_grad:
            gw = np.matmul(gmat, cols.transpose(0, 1, 3, 2)).sum(axis=0).reshape(spec.weight_shape)
        if bias is not None and bias.requires_grad:
            gb = gy.sum(axis=(0, 2, 3))
        return (gx, gw) if bias is None else (gx, gw, gb)

    return _result("conv2d", inputs, y, backward)


def bias_add(x: Tensor, bias: Tensor) -> Tensor:
    """Add one value per channel."""
    if bias.shape != (x.shape[1],):
        raise ShapeMismatchError(f"bias shape {bias.shape} does not match {x.shape[1]} channels")
    y = x.data + bias.data.reshape(1, -1, 1, 1)

    def backward(gy: np.ndarray):
        return gy, gy.sum(axis=(0, 2, 3))

    return _result("bias_add", (x, bias), y, backward)


# ---------------------------------------------------------------------------
# resampling


def maxpool2d_2x2(x: Tensor) -> Tensor:
    """Non-overlapping 2x2 max-pool, stride 2.

    Ties route the gradient to the first element in scan order.
    """
    n, c, oh, ow = maxpool2x2_shape(x.shape)
    windows = (
        x.data.reshape(n, c, oh, 2, ow, 2)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, oh, ow, 4)
    )
    arg = windows.argmax(axis=-1)[..., None]
    y = np.take_along_axis(windows, arg, axis=-1)[..., 0]

    def backward(gy: np.ndarray):
        gwin = np.zeros((n, c, oh, ow, 4), dtype=gy.dtype)
        np.put_along_axis(gwin, arg, gy[..., None], axis=-1)
        gx = gwin.reshape(n, c, oh, ow, 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(x.shape)
        return (gx,)

    return _result("maxpool2d_2x2", (x,), y, backward)


def interpolation_matrix(in_size: int, out_size: int, dtype=np.float64) -> np.ndarray:
    """Row-stochastic (out_size, in_size) bilinear weights, half-pixel mapping."""
    scale = in_size / out_size
    src = (np.arange(out_size, dtype=np.float64) + 0.5) * scale - 0.5
    src = np.clip(src, 0.0, None)
    i0 = np.minimum(np.floor(src).astype(np.int64), in_size - 1)
    i1 = np.minimum(i0 + 1, in_size - 1)
    frac = src - i0
    m = np.zeros((out_size, in_size), dtype=np.float64)
    rows = np.arange(out_size)
    np.add.at(m, (rows, i0), 1.0 - frac)
    np.add.at(m, (rows, i1), frac)
    return m.astype(dtype)


def resize_bilinear(x: Tensor, size: Tuple[int, int]) -> Tensor:
    """Separable bilinear resize to ``size`` (half-pixel, not corner-aligned)."""
    n, c, h, w = x.shape
    out_h, out_w = size
    a_h = interpolation_matrix(h, out_h, x.dtype)
    a_w = interpolation_matrix(w, out_w, x.dtype)
    y = np.matmul(np.matmul(a_h, x.data), a_w.T)

    def backward(gy: np.ndarray):
        return (np.matmul(np.matmul(a_h.T, gy), a_w),)

    return _result("resize_bilinear", (x,), y, backward)


def upsample_bilinear(x: Tensor, scale: int) -> Tensor:
    _, _, out_h, out_w = upsample_shape(x.shape, scale)
    return resize_bilinear(x, (out_h, out_w))


# ---------------------------------------------------------------------------
# activations


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    y = np.where(mask, x.data, 0).astype(x.dtype, copy=False)

    def backward(gy: np.ndarray):
        return (gy * mask,)

    return _result("relu", (x,), y, backward)


def prelu(x: Tensor, slope: Tensor) -> Tensor:
    """max(0, x) + slope * min(0, x) with a learnable scalar slope."""
    if slope.data.size != 1:
        raise ShapeMismatchError(f"prelu slope must be a scalar, got shape {slope.shape}")
    lam = slope.data.reshape(())
    negative = np.minimum(x.data, 0)
    y = np.maximum(x.data, 0) + lam * negative

    def backward(gy: np.ndarray):
        gx = np.where(x.data > 0, gy, gy * lam)
        gs = np.asarray((gy * negative).sum(), dtype=slope.dtype).reshape(slope.shape)
        return gx, gs

    return _result("prelu", (x, slope), y, backward)


def identity(x: Tensor) -> Tensor:
    return x


def sigmoid(x: Tensor) -> Tensor:
    z = np.exp(-np.abs(x.data))
    y = np.where(x.data >= 0, 1.0 / (1.0 + z), z / (1.0 + z)).astype(x.dtype, copy=False)

    def backward(gy: np.ndarray):
        return (gy * y * (1.0 - y),)

    return _result("sigmoid", (x,), y, backward)


# ---------------------------------------------------------------------------
# structural


def concat_channels(inputs: Sequence[Tensor]) -> Tensor:
    concat_shape([t.shape for t in inputs])
    y = np.concatenate([t.data for t in inputs], axis=1)
    bounds = np.cumsum([0] + [t.shape[1] for t in inputs])

    def backward(gy: np.ndarray):
        return tuple(gy[:, bounds[i] : bounds[i + 1]] for i in range(len(inputs)))

    return _result("concat_channels", tuple(inputs), y, backward)


def add(a: Tensor, b: Tensor) -> Tensor:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"add needs equal shapes, got {a.shape} and {b.shape}")
    y = a.data + b.data

    def backward(gy: np.ndarray):
        return gy, gy

    return _result("add", (a, b), y, backward)


def add_all(tensors: Sequence[Tensor]) -> Tensor:
    out = tensors[0]
    for t in tensors[1:]:
        out = add(out, t)
    return out


# ---------------------------------------------------------------------------
# losses


def _check_target(pred: Tensor, target: Tensor) -> None:
    if pred.shape != target.shape:
        raise ShapeMismatchError(f"prediction {pred.shape} and target {target.shape} differ")
    t = target.data
    if not np.all((t == 0) | (t == 1)):
        raise NonBinaryTargetError("target must contain only 0 and 1")


def bce_loss(pred: Tensor, target: Tensor, eps: float = BCE_EPS) -> Tensor:
    """Mean binary cross-entropy of probabilities against a binary mask."""
    _check_target(pred, target)
    t = target.data.astype(pred.dtype, copy=False)
    p = np.clip(pred.data, eps, 1.0 - eps)
    loss = -np.mean(t * np.log(p) + (1.0 - t) * np.log(1.0 - p))
    inside = (pred.data > eps) & (pred.data < 1.0 - eps)
    count = pred.data.size

    def backward(gy: np.ndarray):
        g = (-t / p + (1.0 - t) / (1.0 - p)) / count
        return (gy * g * inside, None)

    return _result("bce_loss", (pred, target), np.asarray(loss, dtype=pred.dtype), backward)


def dice_loss(pred: Tensor, target: Tensor, smooth: float = 1.0) -> Tensor:
    """Soft Dice loss, 1 - (2 sum(p t) + s) / (sum(p) + sum(t) + s)."""
    _check_target(pred, target)
    p = pred.data
    t = target.data.astype(pred.dtype, copy=False)
    inter = float((p * t).sum())
    union = float(p.sum() + t.sum())
    loss = 1.0 - (2.0 * inter + smooth) / (union + smooth)

    def backward(gy: np.ndarray):
        g = -(2.0 * t * (union + smooth) - (2.0 * inter + smooth)) / (union + smooth) ** 2
        return (gy * g.astype(pred.dtype, copy=False), None)

    return _result("dice_loss", (pred, target), np.asarray(loss, dtype=pred.dtype), backward)


def activation(x: Tensor, kind: str, slope: Optional[Tensor] = None) -> Tensor:
    """Dispatch on activation kind: ``relu``, ``prelu`` or ``identity``."""
    if kind == "relu":
        return relu(x)
    if kind == "prelu":
        if slope is None:
            raise ShapeMismatchError("prelu needs a slope parameter")
        return prelu(x, slope)
    if kind == "identity":
        return identity(x)
    raise ValueError(f"unknown activation kind {kind!r}")


__all__: List[str] = [
    "activation",
    "add",
    "add_all",
    "bce_loss",
    "bias_add",
    "concat_channels",
    "conv2d",
    "dice_loss",
    "identity",
    "interpolation_matrix",
    "maxpool2d_2x2",
    "prelu",
    "relu",
    "resize_bilinear",
    "sigmoid",
    "upsample_bilinear",
]
