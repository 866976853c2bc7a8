from slpnet.data.augment import Transform, apply_transform, augment, draw_transform
from slpnet.data.batching import (
    Batch,
    SegmentationDataset,
    batch_count,
    epoch_order,
    iter_batches,
    open_corpus,
    sample_rng,
    split_corpus,
)
from slpnet.data.loader import SamplePair, SampleRef, discover, load_image, load_mask, load_pair, make_split, read_id_list
from slpnet.data.synth import make_samples, write_corpus

__all__ = [
    "Batch",
    "SamplePair",
    "SampleRef",
    "SegmentationDataset",
    "Transform",
    "apply_transform",
    "augment",
    "batch_count",
    "discover",
    "draw_transform",
    "epoch_order",
    "iter_batches",
    "load_image",
    "load_mask",
    "load_pair",
    "make_samples",
    "make_split",
    "open_corpus",
    "read_id_list",
    "sample_rng",
    "split_corpus",
    "write_corpus",
]
