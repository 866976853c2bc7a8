"""Mask-consistent flip/rotate augmentation.

The transform group has 16 elements: horizontal flip (2) x vertical flip (2)
x rotation by a multiple of 90 degrees (4). Flips are applied first, then the
counter-clockwise rotation; image and mask always receive the same transform.
Every transform is a pixel permutation, so mask binarity and lesion area are
preserved exactly.
"""

from dataclasses import dataclass

import numpy as np

from slpnet.core.errors import NonSquareError
from slpnet.data.loader import SamplePair


@dataclass(frozen=True)
class Transform:
    hflip: bool = False
    vflip: bool = False
    # counter-clockwise quarter turns, 0..3
    quarter_turns: int = 0

    @property
    def is_identity(self) -> bool:
        return not self.hflip and not self.vflip and self.quarter_turns % 4 == 0


def draw_transform(rng: np.random.Generator) -> Transform:
    """Independent 50% flips and a uniform quarter-turn count."""
    hflip = bool(rng.random() < 0.5)
    vflip = bool(rng.random() < 0.5)
    turns = int(rng.integers(4))
    return Transform(hflip=hflip, vflip=vflip, quarter_turns=turns)


def _apply(array: np.ndarray, t: Transform) -> np.ndarray:
    # (C, H, W): width is axis 2, height axis 1
    if t.hflip:
        array = array[:, :, ::-1]
    if t.vflip:
        array = array[:, ::-1, :]
    if t.quarter_turns % 4:
        array = np.rot90(array, k=t.quarter_turns, axes=(1, 2))
    return np.ascontiguousarray(array)


def apply_transform(pair: SamplePair, t: Transform) -> SamplePair:
    h, w = pair.image.shape[1:]
    if t.quarter_turns % 2 and h != w:
        raise NonSquareError(f"rotation needs square samples, got {h}x{w}")
    if t.is_identity:
        return pair
    return SamplePair(image=_apply(pair.image, t), mask=_apply(pair.mask, t), id=pair.id)


def augment(pair: SamplePair, rng: np.random.Generator) -> SamplePair:
    h, w = pair.image.shape[1:]
    if h != w:
        raise NonSquareError(f"augmentation needs square samples, got {h}x{w}")
    return apply_transform(pair, draw_transform(rng))
