"""Tests for settings, the config file and logging setup."""

import json
import logging

import pytest

from slpnet.core.config import Settings, load_settings, read_config_file
from slpnet.core.errors import ConfigError, UnreadablePathError
from slpnet.core.logging import configure_logging


def test_defaults():
    settings = Settings()
    assert settings.EPOCHS == 50
    assert settings.BATCH_SIZE == 20
    assert settings.LR == 1e-3
    assert settings.WEIGHT_DECAY == 1e-4
    assert settings.TRAIN_COUNT == 2074
    assert settings.IMAGE_SIZE == 224
    assert settings.STAGE_WIDTHS == (16, 32, 64, 128)
    assert settings.DILATIONS == (0, 4, 8, 16)


def test_precedence(tmp_path, monkeypatch):
    monkeypatch.setenv("BATCH_SIZE", "7")
    monkeypatch.setenv("EPOCHS", "9")
    config = tmp_path / "run.env"
    config.write_text("EPOCHS=3\nSEED=5\n# comment\nSTAGE_WIDTHS=8,16,32,64\n")

    settings = load_settings(config, {"SEED": 11, "LR": None})
    assert settings.BATCH_SIZE == 7
    assert settings.EPOCHS == 3
    assert settings.SEED == 11
    assert settings.LR == 1e-3
    assert settings.STAGE_WIDTHS == (8, 16, 32, 64)
    assert "EPOCHS" in settings.model_fields_set


def test_dotenv_in_working_directory(tmp_path):
    (tmp_path / ".env").write_text("EPOCHS=12\n")
    assert Settings().EPOCHS == 12


def test_tuple_parsing():
    assert Settings(DILATIONS="(1, 2, 3, 4)").DILATIONS == (1, 2, 3, 4)
    assert Settings(STAGE_WIDTHS=[8, 16, 32, 64]).STAGE_WIDTHS == (8, 16, 32, 64)


def test_invalid_values():
    with pytest.raises(ConfigError, match="IMAGE_SIZE"):
        load_settings(overrides={"IMAGE_SIZE": 100})
    with pytest.raises(ConfigError, match="EPOCHS"):
        load_settings(overrides={"EPOCHS": 0})
    with pytest.raises(ConfigError):
        load_settings(overrides={"LOSS": "mse"})


def test_missing_config_file(tmp_path):
    with pytest.raises(UnreadablePathError):
        read_config_file(tmp_path / "absent.env")


def test_json_log_file(tmp_path):
    path = tmp_path / "logs" / "run.jsonl"
    logger = configure_logging("DEBUG", path)
    logging.getLogger("slpnet.test").info("epoch done", extra={"epoch": 2, "loss": 0.5})
    for handler in logger.handlers:
        handler.flush()
    record = json.loads(path.read_text().splitlines()[-1])
    assert record["message"] == "epoch done"
    assert record["epoch"] == 2
    assert record["levelname"] == "INFO"


def test_reconfiguring_replaces_handlers(tmp_path):
    configure_logging("INFO", tmp_path / "a.jsonl")
    logger = configure_logging("WARNING")
    installed = [h for h in logger.handlers if getattr(h, "_slpnet_handler", False)]
    assert len(installed) == 1
    assert not isinstance(installed[0], logging.FileHandler)
    assert logger.level == logging.WARNING
