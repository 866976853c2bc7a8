"""End-to-end tests of the command-line surface."""

import json

import numpy as np
import pytest
from PIL import Image

from slpnet import __version__
from slpnet.main import main


@pytest.fixture
def corpus(tmp_path):
    assert main(["gen-synth", "--out", "corpus", "--count", "4", "--size", "32"]) == 0
    return tmp_path / "corpus"


@pytest.fixture
def trained(corpus, tmp_path):
    args = "train --data-root corpus --size 32 --epochs 1 --batch 2 --train-count 3 --out-dir run"
    assert main(args.split()) == 0
    return tmp_path / "run" / "model.ckpt"


def error_line(capsys):
    err = capsys.readouterr().err.strip().splitlines()
    return err[-1]


def test_version(capsys):
    assert main(["--version"]) == 0
    assert __version__ in capsys.readouterr().out


def test_analyze(capsys):
    assert main(["analyze"]) == 0
    out = capsys.readouterr().out
    assert "103,802" in out
    assert "GFLOPs: 1.154" in out


def test_analyze_writes_report(tmp_path):
    assert main(["analyze", "--size", "112", "--out", "analysis.txt"]) == 0
    lines = (tmp_path / "analysis.txt").read_text().splitlines()
    assert "input_size=112,112" in lines
    assert f"flops={1154093472 // 4}" in lines


def test_invalid_size_is_a_config_error(capsys):
    assert main(["analyze", "--size", "100"]) == 9
    assert error_line(capsys).startswith("error[ConfigError]")


def test_unknown_flag(capsys):
    assert main(["analyze", "--bogus"]) == 3
    err = capsys.readouterr().err
    assert err.startswith("error[UnknownFlagError]")
    assert len(err.strip().splitlines()) == 1


def test_missing_flag(capsys):
    assert main(["predict", "--input", "x.png"]) == 4
    assert error_line(capsys).startswith("error[MissingFlagError]")
    assert main([]) == 4


def test_bad_flag_value():
    assert main(["bench", "--iters", "0"]) == 2
    assert main(["analyze", "--size", "big"]) == 2


def test_unreadable_paths(capsys):
    assert main(["train", "--data-root", "nowhere", "--epochs", "1"]) == 5
    assert error_line(capsys).startswith("error[UnreadablePathError]")
    assert main(["analyze", "--config", "missing.env"]) == 5
    assert main(["eval", "--checkpoint", "missing.ckpt"]) == 5
    assert main(["predict", "--input", "nothing", "--out", "preds"]) == 5


def test_gen_synth_layout(corpus):
    images = sorted(p.name for p in (corpus / "images").iterdir())
    masks = sorted(p.name for p in (corpus / "masks").iterdir())
    assert images == [f"synth_{i:04d}.png" for i in range(4)]
    assert masks == [f"synth_{i:04d}_segmentation.png" for i in range(4)]
    with Image.open(corpus / "images" / "synth_0000.png") as img:
        assert img.size == (32, 32)


def test_train_outputs(trained):
    run = trained.parent
    assert trained.is_file()
    assert "steps=2" in (run / "train_report.txt").read_text().splitlines()
    assert (run / "split_train.txt").read_text().split() == ["synth_0000", "synth_0001", "synth_0002"]
    assert (run / "split_test.txt").read_text().split() == ["synth_0003"]


def test_train_is_reproducible(corpus, tmp_path):
    for name in ("a", "b"):
        args = ["train", "--data-root", "corpus", "--size", "32", "--epochs", "1", "--batch", "2"]
        assert main(args + ["--train-count", "3", "--out-dir", name, "--seed", "3"]) == 0
    assert (tmp_path / "a" / "model.ckpt").read_bytes() == (tmp_path / "b" / "model.ckpt").read_bytes()


def test_train_json_log_file(corpus, tmp_path):
    args = ["train", "--data-root", "corpus", "--size", "32", "--epochs", "1", "--batch", "4"]
    assert main(args + ["--out-dir", "run", "--log-file", "logs/train.jsonl"]) == 0
    records = [json.loads(line) for line in (tmp_path / "logs" / "train.jsonl").read_text().splitlines()]
    epochs = [r for r in records if "epoch" in r and "loss" in r]
    assert epochs and epochs[0]["epoch"] == 1
    assert all({"levelname", "name", "message"} <= set(r) for r in records)


def test_eval(trained, tmp_path, capsys):
    assert main(["eval", "--checkpoint", str(trained), "--data-root", "corpus", "--split", "all", "--out", "m.txt"]) == 0
    assert "DSC" in capsys.readouterr().out
    lines = (tmp_path / "m.txt").read_text().splitlines()
    assert "images=4" in lines
    assert any(line.startswith("dsc=") for line in lines)


def test_eval_several_checkpoints(trained, tmp_path, capsys):
    args = ["eval", "--checkpoint", str(trained), str(trained), "--data-root", "corpus", "--train-count", "2"]
    assert main(args + ["--out", "m.txt"]) == 0
    assert "mean ± std over 2 runs" in capsys.readouterr().out
    lines = (tmp_path / "m.txt").read_text().splitlines()
    assert "images=2" in lines
    assert "dsc_std=0.0000" in lines


def test_eval_corrupted_checkpoint(corpus, tmp_path, capsys):
    bad = tmp_path / "bad.ckpt"
    bad.write_bytes(b"SLPNETCK" + bytes(40))
    assert main(["eval", "--checkpoint", str(bad), "--data-root", "corpus"]) == 7
    assert error_line(capsys).startswith("error[CheckpointError]")


def test_predict_writes_binary_masks(trained, corpus, tmp_path):
    odd = tmp_path / "odd.png"
    Image.fromarray(np.full((30, 40, 3), 90, dtype=np.uint8), mode="RGB").save(odd)
    assert main(["predict", "--checkpoint", str(trained), "--input", str(odd), "--out", "preds"]) == 0
    assert main(["predict", "--checkpoint", str(trained), "--input", "corpus/images", "--out", "preds"]) == 0

    with Image.open(tmp_path / "preds" / "odd_pred.png") as mask:
        assert mask.size == (40, 30)
        assert set(np.unique(np.asarray(mask)).tolist()) <= {0, 255}
    for i in range(4):
        with Image.open(tmp_path / "preds" / f"synth_{i:04d}_pred.png") as mask:
            assert mask.size == (32, 32)
            assert set(np.unique(np.asarray(mask)).tolist()) <= {0, 255}


def test_bench(tmp_path, capsys):
    assert main(["bench", "--size", "32", "--iters", "2", "--warmup", "0", "--out", "bench.txt"]) == 0
    assert "FPS:" in capsys.readouterr().out
    assert "iters=2" in (tmp_path / "bench.txt").read_text().splitlines()


def read_report(path):
    lines = path.read_text().splitlines()
    return dict(line.split("=", 1) for line in lines if line and not line.startswith("#"))


@pytest.mark.slow
def test_default_recipe_fits_a_small_synthetic_corpus(tmp_path):
    assert main(["gen-synth", "--out", "corpus", "--count", "8", "--size", "96"]) == 0
    assert main(["train", "--data-root", "corpus", "--size", "96", "--epochs", "200", "--out-dir", "run"]) == 0

    values = read_report(tmp_path / "run" / "train_report.txt")
    assert values["steps"] == "200"
    losses = [float(values[f"epochs.{i}.mean_loss"]) for i in range(200)]
    assert np.mean(losses[-10:]) < np.mean(losses[:10])
    assert float(values["train_metrics.metrics.dsc"]) > 0.95
