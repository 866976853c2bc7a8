"""Convolution specification and shape inference.

Everything here is a pure function of shapes and hyperparameters; no tensor
data is ever read, so the analyzer can walk the whole network without
allocating activations.
"""

from dataclasses import dataclass
from typing import Sequence, Tuple, Union

from slpnet.core.errors import (
    EmptyOutputError,
    GroupDivisibilityError,
    OddSpatialError,
    ShapeMismatchError,
    UnsupportedScaleError,
)

Shape4 = Tuple[int, int, int, int]
Pair = Tuple[int, int]

SUPPORTED_SCALES = (2, 4, 8)


def _pair(v: Union[int, Sequence[int]]) -> Pair:
    if isinstance(v, int):
        return (v, v)
    a, b = v
    return (int(a), int(b))


@dataclass(frozen=True)
class ConvSpec:
    """Hyperparameters of one (possibly grouped, dilated) 2-D convolution.

    ``dilation`` is the tap spacing: the number of cells between adjacent
    taps plus one, so 1 is an ordinary convolution.
    """

    out_channels: int
    in_channels_per_group: int
    kernel: Pair = (3, 3)
    stride: Pair = (1, 1)
    padding: Pair = (0, 0)
    dilation: Pair = (1, 1)
    groups: int = 1

    def __post_init__(self):
        for field in ("kernel", "stride", "padding", "dilation"):
            object.__setattr__(self, field, _pair(getattr(self, field)))
        if self.groups < 1:
            raise GroupDivisibilityError(f"groups must be >= 1, got {self.groups}")
        if self.out_channels % self.groups:
            raise GroupDivisibilityError(
                f"out_channels {self.out_channels} not divisible by groups {self.groups}"
            )
        if min(self.kernel) < 1 or min(self.stride) < 1 or min(self.dilation) < 1:
            raise ShapeMismatchError(
                f"kernel, stride and dilation must be >= 1, got {self.kernel}/{self.stride}/{self.dilation}"
            )
        if min(self.padding) < 0:
            raise ShapeMismatchError(f"padding must be >= 0, got {self.padding}")

    @classmethod
    def same(
        cls,
        in_channels: int,
        out_channels: int,
        kernel: Union[int, Pair],
        dilation: Union[int, Pair] = 1,
        groups: int = 1,
    ) -> "ConvSpec":
        """Stride-1 spec whose padding preserves spatial size (odd kernels)."""
        kh, kw = _pair(kernel)
        dh, dw = _pair(dilation)
        if kh % 2 == 0 or kw % 2 == 0:
            raise ShapeMismatchError(f"size-preserving padding needs odd kernels, got {(kh, kw)}")
        if in_channels % groups:
            raise GroupDivisibilityError(f"in_channels {in_channels} not divisible by groups {groups}")
        return cls(
            out_channels=out_channels,
            in_channels_per_group=in_channels // groups,
            kernel=(kh, kw),
            padding=(dh * (kh - 1) // 2, dw * (kw - 1) // 2),
            dilation=(dh, dw),
            groups=groups,
        )

    @property
    def in_channels(self) -> int:
        return self.groups * self.in_channels_per_group

    @property
    def weight_shape(self) -> Shape4:
        return (self.out_channels, self.in_channels_per_group, *self.kernel)

    @property
    def extent(self) -> Pair:
        """Effective tap extent along each axis."""
        return tuple(d * (k - 1) + 1 for d, k in zip(self.dilation, self.kernel))

    def weight_count(self) -> int:
        oc, icg, kh, kw = self.weight_shape
        return oc * icg * kh * kw


def conv2d_shape(shape: Sequence[int], spec: ConvSpec) -> Shape4:
    n, c, h, w = shape
    if c != spec.in_channels:
        raise ShapeMismatchError(
            f"conv expects {spec.in_channels} input channels "
            f"({spec.groups} groups x {spec.in_channels_per_group}), got {c}"
        )
    (ph, pw), (sh, sw) = spec.padding, spec.stride
    eh, ew = spec.extent
    out_h = (h + 2 * ph - eh) // sh + 1
    out_w = (w + 2 * pw - ew) // sw + 1
    if h + 2 * ph < eh or w + 2 * pw < ew or out_h < 1 or out_w < 1:
        raise EmptyOutputError(f"conv on {h}x{w} with extent {eh}x{ew} and padding {spec.padding} is empty")
    return (n, spec.out_channels, out_h, out_w)


def conv2d_macs(shape: Sequence[int], spec: ConvSpec) -> int:
    n, oc, oh, ow = conv2d_shape(shape, spec)
    kh, kw = spec.kernel
    return n * oc * oh * ow * spec.in_channels_per_group * kh * kw


def maxpool2x2_shape(shape: Sequence[int]) -> Shape4:
    n, c, h, w = shape
    if h % 2 or w % 2:
        raise OddSpatialError(f"2x2 max-pool needs even spatial dims, got {h}x{w}")
    return (n, c, h // 2, w // 2)


def upsample_shape(shape: Sequence[int], scale: int) -> Shape4:
    if scale not in SUPPORTED_SCALES:
        raise UnsupportedScaleError(f"upsample scale must be one of {SUPPORTED_SCALES}, got {scale}")
    n, c, h, w = shape
    return (n, c, h * scale, w * scale)


def concat_shape(shapes: Sequence[Sequence[int]]) -> Shape4:
    if not shapes:
        raise ShapeMismatchError("concat needs at least one input")
    n, _, h, w = shapes[0]
    for s in shapes[1:]:
        if (s[0], s[2], s[3]) != (n, h, w):
            raise ShapeMismatchError(f"concat inputs disagree on n/h/w: {shapes[0]} vs {s}")
    return (n, sum(s[1] for s in shapes), h, w)


def numel(shape: Sequence[int]) -> int:
    total = 1
    for d in shape:
        total *= d
    return total
