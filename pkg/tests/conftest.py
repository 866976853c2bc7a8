"""Shared fixtures."""

import logging

import numpy as np
import pytest

from slpnet.data.batching import SegmentationDataset
from slpnet.data.synth import make_samples, write_corpus
from slpnet.nn.model import build
from slpnet.schemas.model import ModelConfig

TINY_SIZE = 32


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_config():
    return ModelConfig(input_size=(TINY_SIZE, TINY_SIZE))


@pytest.fixture
def tiny_model(tiny_config):
    return build(tiny_config)


@pytest.fixture
def synth_pairs():
    return make_samples(4, seed=0, size=TINY_SIZE)


@pytest.fixture
def synth_dataset(synth_pairs):
    return SegmentationDataset.from_pairs(synth_pairs)


@pytest.fixture
def synth_corpus(tmp_path):
    """Four PNG pairs in the default images/ + masks/ layout."""
    return write_corpus(tmp_path / "corpus", count=4, seed=0, size=TINY_SIZE)


@pytest.fixture(autouse=True)
def isolated_env(monkeypatch, tmp_path):
    """Keep settings independent of the caller's environment and any .env file."""
    for key in ("SEED", "IMAGE_SIZE", "EPOCHS", "BATCH_SIZE", "DATA_ROOT", "OUT_DIR", "LOG_FILE", "LOG_LEVEL"):
        monkeypatch.delenv(key, raising=False)
    monkeypatch.chdir(tmp_path)
    yield
    logger = logging.getLogger("slpnet")
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()
