"""train: fit SLP-Net on an image/mask corpus."""

import argparse
import logging
from pathlib import Path

from slpnet.cli.common import model_config, open_dataset
from slpnet.cli.parser import add_common_flags, add_data_flags, positive_int
from slpnet.core.config import Settings
from slpnet.data.batching import split_corpus
from slpnet.schemas.training import TrainConfig
from slpnet.training.trainer import train_runs

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser("train", help="train a model", description="Train SLP-Net with Adam.")
    add_data_flags(parser)
    add_common_flags(parser)
    group = parser.add_argument_group("training")
    group.add_argument("--epochs", type=positive_int, help="epochs (default 50)")
    group.add_argument("--batch", type=positive_int, help="batch size (default 20)")
    group.add_argument("--lr", type=float, help="Adam learning rate (default 1e-3)")
    group.add_argument("--wd", type=float, help="weight decay (default 1e-4)")
    group.add_argument("--decoupled-wd", action="store_true", default=None, help="decay weights after the Adam step")
    group.add_argument("--loss", choices=["bce", "bce+dice"], help="training loss (default bce)")
    group.add_argument("--out-dir", help="where checkpoints and reports go (default 'runs')")
    group.add_argument("--checkpoint-every", type=positive_int, help="checkpoint cadence in epochs (default 10)")
    group.add_argument("--eval-every", type=int, help="evaluate the test split every k epochs (default off)")
    group.add_argument("--runs", type=positive_int, default=1, help="independent runs with seeds seed, seed+1, ...")
    group.add_argument("--no-augment", action="store_true", help="disable flip/rotate augmentation")
    parser.set_defaults(handler=run)


def _write_ids(path: Path, ids) -> None:
    path.write_text("".join(f"{i}\n" for i in ids), encoding="utf-8")


def run(args: argparse.Namespace, settings: Settings) -> int:
    dataset = open_dataset(settings)
    split, train_set, test_set = split_corpus(dataset, settings.TRAIN_COUNT, settings.SPLIT_TRAIN, settings.SPLIT_TEST)
    logger.info("split: %d train, %d test", len(split.train), len(split.test))

    out_dir = Path(settings.OUT_DIR)
    out_dir.mkdir(parents=True, exist_ok=True)
    _write_ids(out_dir / "split_train.txt", split.train)
    _write_ids(out_dir / "split_test.txt", split.test)

    config = TrainConfig(
        epochs=settings.EPOCHS,
        batch_size=settings.BATCH_SIZE,
        lr=settings.LR,
        weight_decay=settings.WEIGHT_DECAY,
        decoupled_weight_decay=settings.DECOUPLED_WEIGHT_DECAY,
        loss=settings.LOSS,
        seed=settings.SEED,
        checkpoint_every=settings.CHECKPOINT_EVERY,
        eval_every=settings.EVAL_EVERY,
        num_workers=settings.NUM_WORKERS,
        augment=not args.no_augment,
        threshold=settings.THRESHOLD,
    )
    eval_set = test_set if len(test_set) else None
    reports = train_runs(model_config(settings), train_set, config, out_dir, args.runs, eval_set)

    for report in reports:
        last = report.epochs[-1]
        line = f"seed {report.seed}: {report.steps} steps, final loss {last.mean_loss:.4f}"
        if report.train_metrics is not None:
            line += f", train DSC {100 * report.train_metrics.metrics.dsc:.2f}"
        print(f"{line} -> {report.checkpoint_path}")
    return 0
