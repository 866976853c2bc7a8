"""Tests for checkpoint save and load."""

import numpy as np
import pytest

from slpnet.core.errors import CheckpointError
from slpnet.nn.checkpoint import MAGIC, load_checkpoint, load_into, save_checkpoint
from slpnet.nn.model import build
from slpnet.schemas.model import ModelConfig
from slpnet.tensor.tensor import Tensor


def test_round_trip_reproduces_outputs(tiny_model, tmp_path, rng):
    path = save_checkpoint(tiny_model, tmp_path / "model.ckpt")
    restored = load_checkpoint(path)
    assert restored.config == tiny_model.config
    assert restored.param_store().names() == tiny_model.param_store().names()

    x = Tensor(rng.random((1, 3, 32, 32)).astype(np.float32))
    assert np.array_equal(restored(x).data, tiny_model(x).data)


def test_equal_models_give_identical_bytes(tiny_config, tmp_path):
    a = save_checkpoint(build(tiny_config), tmp_path / "a.ckpt")
    b = save_checkpoint(build(tiny_config), tmp_path / "b.ckpt")
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes().startswith(MAGIC)


def test_load_into_existing_model(tiny_config, tmp_path):
    source = build(tiny_config, seed=3)
    path = save_checkpoint(source, tmp_path / "model.ckpt")
    target = load_into(build(tiny_config, seed=4), path)
    for (name, a, _), (_, b, _) in zip(source.named_parameters(), target.named_parameters()):
        assert np.array_equal(a.data, b.data), name


def test_corrupted_checkpoint(tiny_model, tmp_path):
    path = save_checkpoint(tiny_model, tmp_path / "model.ckpt")
    raw = bytearray(path.read_bytes())
    raw[len(raw) // 2] ^= 0xFF
    path.write_bytes(bytes(raw))
    with pytest.raises(CheckpointError, match="checksum"):
        load_checkpoint(path)


def test_truncated_checkpoint(tiny_model, tmp_path):
    path = save_checkpoint(tiny_model, tmp_path / "model.ckpt")
    path.write_bytes(path.read_bytes()[:100])
    with pytest.raises(CheckpointError):
        load_checkpoint(path)


def test_foreign_file(tmp_path):
    path = tmp_path / "model.ckpt"
    path.write_bytes(b"PK\x03\x04" + bytes(64))
    with pytest.raises(CheckpointError, match="not an SLP-Net checkpoint"):
        load_checkpoint(path)
    with pytest.raises(CheckpointError, match="not found"):
        load_checkpoint(tmp_path / "missing.ckpt")


def test_architecture_mismatch(tiny_model, tmp_path):
    path = save_checkpoint(tiny_model, tmp_path / "model.ckpt")
    other = ModelConfig(stage_widths=(8, 16, 32, 64), input_size=(32, 32))
    with pytest.raises(CheckpointError):
        load_checkpoint(path, config=other)
    with pytest.raises(CheckpointError):
        load_into(build(other), path)
    # seed and input size do not change the parameter layout
    compatible = ModelConfig(input_size=(64, 64), seed=9)
    assert load_checkpoint(path, config=compatible).param_count() == tiny_model.param_count()
