"""Tests for loading, splitting, augmentation, batching and the synthetic corpus."""

import numpy as np
import pytest
from PIL import Image
from pydantic import ValidationError

from slpnet.core.errors import DecodeError, EmptySplitError, MissingFileError, NonSquareError, UsageError
from slpnet.data import (
    SamplePair,
    SegmentationDataset,
    Transform,
    apply_transform,
    augment,
    batch_count,
    discover,
    iter_batches,
    load_pair,
    make_samples,
    make_split,
    open_corpus,
    read_id_list,
    split_corpus,
)


def save_png(path, array, mode):
    path.parent.mkdir(parents=True, exist_ok=True)
    Image.fromarray(array.astype(np.uint8), mode=mode).save(path)
    return path


def one_hot(h, w, i, j):
    x = np.zeros((1, h, w), dtype=np.float32)
    x[0, i, j] = 1.0
    return x


def tiny_pairs(count, size=2):
    return [
        SamplePair(np.zeros((3, size, size), np.float32), np.zeros((1, size, size), np.float32), f"s{i:05d}")
        for i in range(count)
    ]


# loading


def test_load_pair_resizes_and_thresholds(tmp_path):
    rgb = np.full((30, 40, 3), 200)
    mask = np.zeros((30, 40))
    mask[:, :20] = 127
    mask[:, 20:] = 128
    image_path = save_png(tmp_path / "a.png", rgb, "RGB")
    mask_path = save_png(tmp_path / "a_segmentation.png", mask, "L")

    pair = load_pair(image_path, mask_path, target_size=16)
    assert pair.id == "a"
    assert pair.image.shape == (3, 16, 16)
    assert pair.mask.shape == (1, 16, 16)
    np.testing.assert_allclose(pair.image, 200 / 255, rtol=1e-6)
    assert set(np.unique(pair.mask).tolist()) == {0.0, 1.0}
    assert pair.mask[0, :, :8].max() == 0.0
    assert pair.mask[0, :, 8:].min() == 1.0


def test_all_lesion_mask(tmp_path):
    image_path = save_png(tmp_path / "b.png", np.zeros((8, 8, 3)), "RGB")
    mask_path = save_png(tmp_path / "b_segmentation.png", np.full((8, 8), 255), "L")
    assert load_pair(image_path, mask_path).mask.min() == 1.0


def test_load_errors(tmp_path):
    image_path = save_png(tmp_path / "c.png", np.zeros((8, 8, 3)), "RGB")
    with pytest.raises(MissingFileError):
        load_pair(image_path, tmp_path / "missing.png")
    garbage = tmp_path / "broken.png"
    garbage.write_bytes(b"not an image")
    with pytest.raises(DecodeError):
        load_pair(image_path, garbage)


# discovery and splits


def test_discover_pairs_and_skips_orphans(synth_corpus):
    save_png(synth_corpus / "images" / "orphan.png", np.zeros((8, 8, 3)), "RGB")
    (synth_corpus / "images" / "notes.txt").write_text("ignored")
    refs = discover(synth_corpus)
    assert list(refs) == ["synth_0000", "synth_0001", "synth_0002", "synth_0003"]
    assert refs["synth_0002"].mask_path.name == "synth_0002_segmentation.png"


def test_discover_errors(tmp_path):
    with pytest.raises(MissingFileError):
        discover(tmp_path / "nowhere")
    (tmp_path / "empty" / "images").mkdir(parents=True)
    (tmp_path / "empty" / "masks").mkdir()
    with pytest.raises(EmptySplitError):
        discover(tmp_path / "empty")


def test_make_split_by_count():
    split = make_split(["e", "c", "a", "d", "b"], train_count=3)
    assert split.train == ["a", "b", "c"]
    assert split.test == ["d", "e"]
    assert split.all == ["a", "b", "c", "d", "e"]


def test_make_split_from_lists():
    split = make_split(["a", "b", "c"], test_ids=["b"])
    assert split.train == ["a", "c"]
    with pytest.raises(MissingFileError):
        make_split(["a", "b"], train_ids=["z"])
    with pytest.raises(ValidationError):
        make_split(["a", "b"], train_ids=["a"], test_ids=["a", "b"])


def test_shuffled_split_is_seeded():
    ids = [f"id{i}" for i in range(20)]
    a = make_split(ids, train_count=15, shuffle_seed=3)
    b = make_split(ids, train_count=15, shuffle_seed=3)
    assert a == b
    assert sorted(a.all) == sorted(ids)


def test_split_corpus_with_id_files(synth_corpus, tmp_path):
    test_file = tmp_path / "test.txt"
    test_file.write_text("# held out\nsynth_0001.png\n\nsynth_0003\n")
    assert read_id_list(test_file) == ["synth_0001", "synth_0003"]
    dataset = open_corpus(synth_corpus, target_size=32)
    split, train, test = split_corpus(dataset, split_test=test_file)
    assert train.ids == ["synth_0000", "synth_0002"]
    assert test.ids == ["synth_0001", "synth_0003"]


# augmentation


@pytest.mark.parametrize("turns", range(4))
def test_rotation_moves_a_single_pixel(turns):
    size, i, j = 5, 1, 3
    rotated = apply_transform(SamplePair(np.repeat(one_hot(size, size, i, j), 3, 0), one_hot(size, size, i, j), "p"),
                              Transform(quarter_turns=turns))
    # counter-clockwise quarter turn: (i, j) -> (size - 1 - j, i)
    for _ in range(turns):
        i, j = size - 1 - j, i
    assert rotated.mask[0, i, j] == 1.0
    assert rotated.mask.sum() == 1.0
    assert rotated.image[:, i, j].tolist() == [1.0, 1.0, 1.0]


def test_flips_move_a_single_pixel():
    pair = SamplePair(np.zeros((3, 4, 6), np.float32), one_hot(4, 6, 1, 2), "p")
    assert apply_transform(pair, Transform(hflip=True)).mask[0, 1, 3] == 1.0
    assert apply_transform(pair, Transform(vflip=True)).mask[0, 2, 2] == 1.0


def test_identity_and_involutions(synth_pairs):
    pair = synth_pairs[0]
    assert apply_transform(pair, Transform()) is pair
    for t in (Transform(hflip=True), Transform(vflip=True), Transform(quarter_turns=2)):
        twice = apply_transform(apply_transform(pair, t), t)
        assert np.array_equal(twice.image, pair.image)
        assert np.array_equal(twice.mask, pair.mask)


def test_augment_preserves_lesion_area(synth_pairs):
    rng = np.random.default_rng(0)
    for pair in synth_pairs:
        for _ in range(8):
            out = augment(pair, rng)
            assert out.mask.sum() == pair.mask.sum()
            assert set(np.unique(out.mask).tolist()) <= {0.0, 1.0}
            assert np.isclose(out.image.sum(), pair.image.sum(), rtol=1e-5)


def test_rotation_needs_square_samples():
    pair = SamplePair(np.zeros((3, 4, 6), np.float32), np.zeros((1, 4, 6), np.float32), "p")
    with pytest.raises(NonSquareError):
        apply_transform(pair, Transform(quarter_turns=1))
    with pytest.raises(NonSquareError):
        augment(pair, np.random.default_rng(0))


# batching


def test_batch_count_and_short_last_batch():
    dataset = SegmentationDataset.from_pairs(tiny_pairs(2074))
    assert batch_count(2074, 20) == 104
    sizes = [len(batch) for batch in iter_batches(dataset, 20, seed=0, epoch=0)]
    assert len(sizes) == 104
    assert sizes[-1] == 14
    assert sum(sizes) == 2074


def test_epoch_covers_every_sample_once(synth_dataset):
    ids = [i for batch in iter_batches(synth_dataset, 3, seed=5, epoch=2) for i in batch.ids]
    assert sorted(ids) == sorted(synth_dataset.ids)


def test_batches_independent_of_workers(synth_dataset):
    serial = list(iter_batches(synth_dataset, 3, seed=1, epoch=4, workers=0))
    threaded = list(iter_batches(synth_dataset, 3, seed=1, epoch=4, workers=3))
    for a, b in zip(serial, threaded):
        assert a.ids == b.ids
        assert np.array_equal(a.images, b.images)
        assert np.array_equal(a.masks, b.masks)


def test_epochs_differ(synth_dataset):
    def pixels(epoch):
        return np.concatenate([b.images for b in iter_batches(synth_dataset, 4, seed=1, epoch=epoch)])

    assert np.array_equal(pixels(0), pixels(0))
    assert not all(np.array_equal(pixels(0), pixels(e)) for e in (1, 2, 3))


def test_unshuffled_unaugmented_batches(synth_dataset, synth_pairs):
    batches = list(iter_batches(synth_dataset, 2, shuffle=False, augment_samples=False))
    assert [b.ids for b in batches] == [("synth_0000", "synth_0001"), ("synth_0002", "synth_0003")]
    assert batches[0].images.shape == (2, 3, 32, 32)
    assert np.array_equal(batches[1].masks[1], synth_pairs[3].mask)


def test_batching_errors(synth_dataset):
    with pytest.raises(UsageError):
        next(iter_batches(synth_dataset, 0))
    with pytest.raises(EmptySplitError):
        next(iter_batches(SegmentationDataset([]), 4))


def test_cached_samples_are_read_only(synth_dataset):
    pair = synth_dataset.get(0)
    with pytest.raises(ValueError):
        pair.image[0, 0, 0] = 1.0


# synthetic corpus


def test_synthetic_samples_are_deterministic():
    a, b = make_samples(3, seed=2, size=32), make_samples(3, seed=2, size=32)
    for x, y in zip(a, b):
        assert np.array_equal(x.image, y.image)
        assert np.array_equal(x.mask, y.mask)
        assert x.mask.sum() > 0
        assert x.mask.sum() < x.mask.size
    with pytest.raises(UsageError):
        make_samples(0)


def test_written_corpus_reads_back(synth_corpus, synth_pairs):
    dataset = open_corpus(synth_corpus, target_size=32)
    assert dataset.ids == [p.id for p in synth_pairs]
    for index, expected in enumerate(synth_pairs):
        pair = dataset.get(index)
        np.testing.assert_allclose(pair.image, expected.image, atol=1e-6)
        assert np.array_equal(pair.mask, expected.mask)
