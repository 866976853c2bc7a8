"""Deterministic epoch batching with optional threaded prefetch."""

import logging
import zlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from slpnet.core.errors import EmptySplitError, UsageError
from slpnet.data.augment import augment
from slpnet.data.loader import SamplePair, SampleRef, discover, load_pair, make_split, read_id_list
from slpnet.schemas.data import SplitSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Batch:
    images: np.ndarray
    masks: np.ndarray
    ids: Tuple[str, ...]

    def __len__(self) -> int:
        return len(self.ids)


class SegmentationDataset:
    """A list of sample refs decoded lazily at a fixed target size.

    Decoded pairs are cached; arrays are marked read-only so a cached sample
    can be shared between epochs and workers.
    """

    def __init__(self, refs: Sequence[SampleRef], target_size: Union[int, Tuple[int, int]] = 224, cache: bool = True):
        self.refs = list(refs)
        self.target_size = target_size
        self.cache = cache
        self._cache: Dict[str, SamplePair] = {}

    @classmethod
    def from_pairs(cls, pairs: Sequence[SamplePair]) -> "SegmentationDataset":
        """In-memory dataset; used by tests and the synthetic generator."""
        dataset = cls([], target_size=pairs[0].image.shape[1:] if pairs else 224)
        for pair in pairs:
            dataset.refs.append(SampleRef(id=pair.id, image_path=Path(), mask_path=Path()))
            dataset._cache[pair.id] = _freeze(SamplePair(image=pair.image.copy(), mask=pair.mask.copy(), id=pair.id))
        return dataset

    def __len__(self) -> int:
        return len(self.refs)

    @property
    def ids(self) -> List[str]:
        return [ref.id for ref in self.refs]

    def get(self, index: int) -> SamplePair:
        ref = self.refs[index]
        pair = self._cache.get(ref.id)
        if pair is None:
            pair = _freeze(load_pair(ref.image_path, ref.mask_path, self.target_size, ref.id))
            if self.cache:
                self._cache[ref.id] = pair
        return pair

    def subset(self, ids: Sequence[str]) -> "SegmentationDataset":
        by_id = {ref.id: ref for ref in self.refs}
        missing = [i for i in ids if i not in by_id]
        if missing:
            raise EmptySplitError(f"ids not in dataset: {missing[:5]}")
        child = SegmentationDataset([by_id[i] for i in ids], self.target_size, self.cache)
        child._cache = {i: self._cache[i] for i in ids if i in self._cache}
        return child


def _freeze(pair: SamplePair) -> SamplePair:
    pair.image.setflags(write=False)
    pair.mask.setflags(write=False)
    return pair


def open_corpus(
    data_root: Union[str, Path],
    image_dir: str = "images",
    mask_dir: str = "masks",
    mask_suffix: str = "_segmentation",
    target_size: Union[int, Tuple[int, int]] = 224,
) -> SegmentationDataset:
    refs = discover(data_root, image_dir, mask_dir, mask_suffix)
    logger.info("found %d image/mask pairs under %s", len(refs), data_root)
    return SegmentationDataset(list(refs.values()), target_size)


def split_corpus(
    dataset: SegmentationDataset,
    train_count: int = 2074,
    split_train: Optional[Union[str, Path]] = None,
    split_test: Optional[Union[str, Path]] = None,
) -> Tuple[SplitSpec, SegmentationDataset, SegmentationDataset]:
    train_ids = read_id_list(split_train) if split_train else None
    test_ids = read_id_list(split_test) if split_test else None
    split = make_split(dataset.ids, train_count, train_ids, test_ids)
    return split, dataset.subset(split.train), dataset.subset(split.test)


def epoch_order(count: int, seed: int, epoch: int) -> np.ndarray:
    """Permutation of ``range(count)`` fixed by (seed, epoch)."""
    return np.random.default_rng(np.random.SeedSequence([seed, epoch])).permutation(count)


def sample_rng(seed: int, epoch: int, sample_id: str) -> np.random.Generator:
    """Augmentation generator fixed by (seed, epoch, id), independent of batch position."""
    return np.random.default_rng(np.random.SeedSequence([seed, epoch, zlib.crc32(sample_id.encode("utf-8"))]))


def batch_count(size: int, batch_size: int) -> int:
    return -(-size // batch_size)


def _collate(pairs: Sequence[SamplePair]) -> Batch:
    return Batch(
        images=np.stack([p.image for p in pairs]).astype(np.float32, copy=False),
        masks=np.stack([p.mask for p in pairs]).astype(np.float32, copy=False),
        ids=tuple(p.id for p in pairs),
    )


def iter_batches(
    dataset: SegmentationDataset,
    batch_size: int,
    seed: int = 0,
    epoch: int = 0,
    shuffle: bool = True,
    augment_samples: bool = True,
    workers: int = 0,
) -> Iterator[Batch]:
    """Yield the epoch's batches; the last one may be short.

    Order and augmented pixels depend only on (ids, seed, epoch): each
    sample draws from its own generator, so ``workers`` only changes speed.
    """
    if batch_size < 1:
        raise UsageError(f"batch size must be at least 1, got {batch_size}")
    if len(dataset) == 0:
        raise EmptySplitError("cannot batch an empty split")

    order = epoch_order(len(dataset), seed, epoch) if shuffle else np.arange(len(dataset))

    def prepare(index: int) -> SamplePair:
        pair = dataset.get(int(index))
        if augment_samples:
            pair = augment(pair, sample_rng(seed, epoch, pair.id))
        return pair

    chunks = [order[i : i + batch_size] for i in range(0, len(order), batch_size)]
    if workers > 0:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            # map preserves submission order
            for chunk in chunks:
                yield _collate(list(pool.map(prepare, chunk)))
    else:
        for chunk in chunks:
            yield _collate([prepare(i) for i in chunk])
