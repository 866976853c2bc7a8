"""Synthetic lesion corpus: one lighter filled disc per image on a dark textured background."""

import logging
from pathlib import Path
from typing import List, Union

import numpy as np
from PIL import Image

from slpnet.core.errors import UsageError
from slpnet.data.loader import SamplePair

logger = logging.getLogger(__name__)

# radius range at 224x224; scaled linearly with the image size
MIN_RADIUS, MAX_RADIUS = 20, 60
REFERENCE_SIZE = 224


def make_sample(rng: np.random.Generator, size: int = 224, sample_id: str = "synth") -> SamplePair:
    scale = size / REFERENCE_SIZE
    radius = rng.uniform(MIN_RADIUS, MAX_RADIUS) * scale
    margin = min(radius, size / 2)
    cy, cx = rng.uniform(margin, size - margin, size=2)
    yy, xx = np.mgrid[0:size, 0:size]
    disc = (yy - cy) ** 2 + (xx - cx) ** 2 <= radius**2

    background = rng.uniform(0.05, 0.25, size=3)
    lesion = rng.uniform(0.55, 0.9, size=3)
    image = np.empty((3, size, size), dtype=np.float32)
    for c in range(3):
        image[c] = np.where(disc, lesion[c], background[c])
    image += rng.normal(0.0, 0.03, size=image.shape).astype(np.float32)
    np.clip(image, 0.0, 1.0, out=image)
    # round-trip through 8 bits so in-memory samples equal what the loader reads back
    image = np.round(image * 255.0) / 255.0
    return SamplePair(image=image.astype(np.float32), mask=disc[None].astype(np.float32), id=sample_id)


def make_samples(count: int, seed: int = 0, size: int = 224) -> List[SamplePair]:
    if count < 1:
        raise UsageError(f"count must be at least 1, got {count}")
    rng = np.random.default_rng(seed)
    return [make_sample(rng, size, f"synth_{i:04d}") for i in range(count)]


def write_corpus(
    out_dir: Union[str, Path],
    count: int = 8,
    seed: int = 0,
    size: int = 224,
    image_dir: str = "images",
    mask_dir: str = "masks",
    mask_suffix: str = "_segmentation",
) -> Path:
    """Write ``count`` PNG image/mask pairs in the loader's directory layout."""
    out = Path(out_dir)
    images, masks = out / image_dir, out / mask_dir
    images.mkdir(parents=True, exist_ok=True)
    masks.mkdir(parents=True, exist_ok=True)
    for pair in make_samples(count, seed, size):
        rgb = np.round(pair.image.transpose(1, 2, 0) * 255.0).astype(np.uint8)
        Image.fromarray(rgb, mode="RGB").save(images / f"{pair.id}.png")
        Image.fromarray((pair.mask[0] * 255).astype(np.uint8), mode="L").save(masks / f"{pair.id}{mask_suffix}.png")
    logger.info("wrote %d synthetic pairs to %s", count, out)
    return out
