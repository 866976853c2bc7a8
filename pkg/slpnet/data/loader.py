"""Image/mask pair loading, corpus discovery and train/test splits."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from PIL import Image, UnidentifiedImageError

from slpnet.core.errors import DecodeError, EmptySplitError, MissingFileError, ShapeMismatchError
from slpnet.schemas.data import SplitSpec

logger = logging.getLogger(__name__)

IMAGE_EXTENSIONS = (".jpg", ".jpeg", ".png", ".bmp", ".tif", ".tiff")
MASK_THRESHOLD = 127


@dataclass(frozen=True)
class SamplePair:
    """One (3, H, W) image in [0, 1] and its (1, H, W) binary mask."""

    image: np.ndarray
    mask: np.ndarray
    id: str

    def __post_init__(self):
        if self.image.ndim != 3 or self.mask.ndim != 3 or self.mask.shape[0] != 1:
            raise ShapeMismatchError(f"expected (C, H, W) image and (1, H, W) mask, got {self.image.shape}/{self.mask.shape}")
        if self.image.shape[1:] != self.mask.shape[1:]:
            raise ShapeMismatchError(f"image {self.image.shape} and mask {self.mask.shape} differ in size")


@dataclass(frozen=True)
class SampleRef:
    """Where one sample lives on disk."""

    id: str
    image_path: Path
    mask_path: Path


def _open(path: Path, mode: str) -> Image.Image:
    if not path.is_file():
        raise MissingFileError(f"file not found: {path}")
    try:
        with Image.open(path) as img:
            return img.convert(mode)
    except (UnidentifiedImageError, OSError) as e:
        raise DecodeError(f"cannot decode {path}: {e}") from e


def _size(target_size: Union[int, Tuple[int, int]]) -> Tuple[int, int]:
    return (target_size, target_size) if isinstance(target_size, int) else tuple(target_size)


def load_image(path: Union[str, Path], target_size: Optional[Union[int, Tuple[int, int]]] = None) -> np.ndarray:
    """(3, H, W) float32 in [0, 1], bilinear-resized to ``target_size`` (H, W) if given."""
    img = _open(Path(path), "RGB")
    if target_size is not None:
        h, w = _size(target_size)
        if img.size != (w, h):
            img = img.resize((w, h), Image.BILINEAR)
    return np.asarray(img, dtype=np.float32).transpose(2, 0, 1) / 255.0


def load_mask(path: Union[str, Path], target_size: Optional[Union[int, Tuple[int, int]]] = None) -> np.ndarray:
    """(1, H, W) float32 in {0, 1}: nearest-neighbour resize, then value > 127."""
    img = _open(Path(path), "L")
    if target_size is not None:
        h, w = _size(target_size)
        if img.size != (w, h):
            img = img.resize((w, h), Image.NEAREST)
    return (np.asarray(img) > MASK_THRESHOLD).astype(np.float32)[None]


def load_pair(
    image_path: Union[str, Path],
    mask_path: Union[str, Path],
    target_size: Optional[Union[int, Tuple[int, int]]] = None,
    sample_id: Optional[str] = None,
) -> SamplePair:
    """Load and resize one pair. Without a target size the two files must agree in size."""
    image = load_image(image_path, target_size)
    mask = load_mask(mask_path, target_size)
    if image.shape[1:] != mask.shape[1:]:
        raise ShapeMismatchError(f"{image_path} and {mask_path} differ in size: {image.shape[1:]} vs {mask.shape[1:]}")
    return SamplePair(image=image, mask=mask, id=sample_id or Path(image_path).stem)


def discover(
    data_root: Union[str, Path],
    image_dir: str = "images",
    mask_dir: str = "masks",
    mask_suffix: str = "_segmentation",
) -> Dict[str, SampleRef]:
    """Pair every image under ``data_root/image_dir`` with ``<stem><mask_suffix>.*`` in ``mask_dir``.

    Returns refs keyed by id, sorted lexicographically. Images without a mask
    are skipped with a warning.
    """
    root = Path(data_root)
    images, masks = root / image_dir, root / mask_dir
    for folder in (images, masks):
        if not folder.is_dir():
            raise MissingFileError(f"directory not found: {folder}")

    mask_index = {p.stem: p for p in masks.iterdir() if p.suffix.lower() in IMAGE_EXTENSIONS}
    refs: Dict[str, SampleRef] = {}
    for path in sorted(images.iterdir()):
        if path.suffix.lower() not in IMAGE_EXTENSIONS:
            continue
        mask_path = mask_index.get(path.stem + mask_suffix)
        if mask_path is None:
            logger.warning("no mask for %s, skipping", path.name)
            continue
        refs[path.stem] = SampleRef(id=path.stem, image_path=path, mask_path=mask_path)
    if not refs:
        raise EmptySplitError(f"no image/mask pairs found under {root}")
    return dict(sorted(refs.items()))


def read_id_list(path: Union[str, Path]) -> List[str]:
    """Plain text, one id per line; blank lines and ``#`` comments ignored."""
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"split file not found: {path}")
    ids = []
    for line in path.read_text(encoding="utf-8").splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            ids.append(Path(line).stem)
    return ids


def make_split(
    ids: Sequence[str],
    train_count: int = 2074,
    train_ids: Optional[Sequence[str]] = None,
    test_ids: Optional[Sequence[str]] = None,
    shuffle_seed: Optional[int] = None,
) -> SplitSpec:
    """Explicit lists when supplied; otherwise the first ``train_count`` sorted ids train."""
    ordered = sorted(ids)
    known = set(ordered)
    if train_ids is not None or test_ids is not None:
        train = list(train_ids) if train_ids is not None else [i for i in ordered if i not in set(test_ids)]
        test = list(test_ids) if test_ids is not None else [i for i in ordered if i not in set(train)]
        unknown = [i for i in train + test if i not in known]
        if unknown:
            raise MissingFileError(f"split lists reference unknown ids: {unknown[:5]}")
        return SplitSpec(train=train, test=test)
    if shuffle_seed is not None:
        order = np.random.default_rng(shuffle_seed).permutation(len(ordered))
        ordered = [ordered[i] for i in order]
    return SplitSpec(train=ordered[:train_count], test=ordered[train_count:])
