"""Training loop, evaluation and repeated-run orchestration."""

import logging
import time
from pathlib import Path
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from slpnet.core.errors import EmptySplitError, NonFiniteLossError
from slpnet.data.batching import SegmentationDataset, iter_batches
from slpnet.metrics import Aggregation, aggregate, binarize, confusion, summarize_runs
from slpnet.nn.checkpoint import load_checkpoint, save_checkpoint
from slpnet.nn.model import SLPNet, build
from slpnet.schemas.metrics import AggregateReport, RunSummary
from slpnet.schemas.model import ModelConfig
from slpnet.schemas.render import write_key_values
from slpnet.schemas.training import EpochRecord, TrainConfig, TrainReport
from slpnet.tensor import ops
from slpnet.tensor.tensor import Tape, Tensor
from slpnet.training.optim import Adam

logger = logging.getLogger(__name__)

CHECKPOINT_DIR = "checkpoints"
FINAL_CHECKPOINT = "model.ckpt"
REPORT_FILE = "train_report.txt"
EVAL_BATCH = 8

EpochHook = Callable[[EpochRecord], None]


def compute_loss(pred: Tensor, target: Tensor, kind: str = "bce") -> Tensor:
    loss = ops.bce_loss(pred, target)
    if kind == "bce+dice":
        loss = ops.add(loss, ops.dice_loss(pred, target))
    return loss


def predict_probs(model: SLPNet, images: np.ndarray, batch_size: int = EVAL_BATCH) -> np.ndarray:
    """Forward ``images`` (n, 3, H, W) without recording; returns (n, 1, H, W) probabilities."""
    outputs = []
    for start in range(0, len(images), batch_size):
        chunk = images[start : start + batch_size]
        outputs.append(model(Tensor(np.ascontiguousarray(chunk))).data)
    return np.concatenate(outputs, axis=0)


def evaluate(
    model: SLPNet,
    dataset: SegmentationDataset,
    threshold: float = 0.5,
    mode: Aggregation = "per-image",
    batch_size: int = EVAL_BATCH,
) -> AggregateReport:
    """Binarize predictions at ``threshold`` (strict) and aggregate per-image confusion counts."""
    if len(dataset) == 0:
        raise EmptySplitError("cannot evaluate an empty split")
    counts = []
    for batch in iter_batches(dataset, batch_size, shuffle=False, augment_samples=False):
        probs = predict_probs(model, batch.images, batch_size)
        for prob, mask in zip(probs, batch.masks):
            counts.append(confusion(binarize(prob, threshold), mask))
    return aggregate(counts, mode)


def evaluate_checkpoints(
    paths: Sequence[Union[str, Path]],
    dataset: SegmentationDataset,
    threshold: float = 0.5,
    mode: Aggregation = "per-image",
) -> Tuple[List[AggregateReport], RunSummary]:
    """Evaluate each checkpoint and summarise mean and sample std across them."""
    reports = []
    for path in paths:
        model = load_checkpoint(path)
        report = evaluate(model, dataset, threshold, mode)
        logger.info("evaluated %s: dsc=%.4f ji=%.4f", path, report.metrics.dsc, report.metrics.ji)
        reports.append(report)
    return reports, summarize_runs(r.metrics for r in reports)


def train(
    model: SLPNet,
    train_set: SegmentationDataset,
    config: Optional[TrainConfig] = None,
    out_dir: Optional[Union[str, Path]] = None,
    eval_set: Optional[SegmentationDataset] = None,
    on_epoch: Optional[EpochHook] = None,
) -> TrainReport:
    """Optimise ``model`` on ``train_set`` for ``config.epochs`` epochs.

    With ``out_dir`` set, checkpoints go to ``out_dir/checkpoints`` every
    ``checkpoint_every`` epochs, the final model to ``out_dir/model.ckpt`` and
    the report to ``out_dir/train_report.txt``.
    """
    config = config or TrainConfig()
    if len(train_set) == 0:
        raise EmptySplitError("training split is empty")
    out = Path(out_dir) if out_dir is not None else None

    params = model.param_store()
    optimizer = Adam(
        params,
        lr=config.lr,
        beta1=config.beta1,
        beta2=config.beta2,
        eps=config.eps,
        weight_decay=config.weight_decay,
        decoupled=config.decoupled_weight_decay,
    )
    report = TrainReport(seed=config.seed)
    report.notes.append(f"loss={config.loss}")
    report.notes.append(f"weight_decay={'decoupled' if config.decoupled_weight_decay else 'coupled'}")
    logger.info(
        "training %d parameters on %d samples for %d epochs (batch %d, seed %d)",
        params.total(),
        len(train_set),
        config.epochs,
        config.batch_size,
        config.seed,
    )

    for epoch in range(1, config.epochs + 1):
        started = time.perf_counter()
        losses = []
        batches = iter_batches(
            train_set,
            config.batch_size,
            seed=config.seed,
            epoch=epoch,
            augment_samples=config.augment,
            workers=config.num_workers,
        )
        for batch in batches:
            optimizer.zero_grad()
            with Tape() as tape:
                pred = model(Tensor(batch.images))
                loss = compute_loss(pred, Tensor(batch.masks), config.loss)
            value = loss.item()
            if not np.isfinite(value):
                raise NonFiniteLossError(
                    f"loss is {value} at epoch {epoch}, step {optimizer.steps + 1} (batch starts with {batch.ids[0]})"
                )
            tape.backward(loss)
            optimizer.step()
            losses.append(value)

        record = EpochRecord(
            epoch=epoch,
            mean_loss=float(np.mean(losses)),
            steps=len(losses),
            wall_time=time.perf_counter() - started,
        )
        if eval_set is not None and config.eval_every and epoch % config.eval_every == 0:
            record.metrics = evaluate(model, eval_set, config.threshold)
        report.epochs.append(record)
        report.steps += record.steps
        logger.info(
            "epoch %d/%d loss=%.4f steps=%d time=%.1fs",
            epoch,
            config.epochs,
            record.mean_loss,
            record.steps,
            record.wall_time,
            extra={"epoch": epoch, "loss": record.mean_loss, "steps": record.steps},
        )
        if record.metrics is not None:
            logger.info("epoch %d eval dsc=%.4f ji=%.4f", epoch, record.metrics.metrics.dsc, record.metrics.metrics.ji)

        if out is not None and epoch % config.checkpoint_every == 0 and epoch != config.epochs:
            path = save_checkpoint(model, out / CHECKPOINT_DIR / f"epoch_{epoch:03d}.ckpt")
            report.checkpoints.append(str(path))
        if on_epoch is not None:
            on_epoch(record)

    if out is not None:
        path = save_checkpoint(model, out / FINAL_CHECKPOINT)
        report.checkpoints.append(str(path))
        report.checkpoint_path = str(path)

    if config.final_eval:
        report.train_metrics = evaluate(model, train_set, config.threshold)
        logger.info("final train-set dsc=%.4f", report.train_metrics.metrics.dsc)

    if out is not None:
        write_key_values(out / REPORT_FILE, report, header=f"train report, seed {config.seed}")
    return report


def train_runs(
    model_config: ModelConfig,
    train_set: SegmentationDataset,
    config: TrainConfig,
    out_dir: Union[str, Path],
    runs: int = 1,
    eval_set: Optional[SegmentationDataset] = None,
) -> List[TrainReport]:
    """Train ``runs`` independent models with seeds ``seed, seed+1, ...``.

    A single run writes straight into ``out_dir``; several runs write into
    ``out_dir/run<i>``.
    """
    reports = []
    for i in range(runs):
        seed = config.seed + i
        run_dir = Path(out_dir) if runs == 1 else Path(out_dir) / f"run{i}"
        model = build(model_config, seed=seed)
        reports.append(train(model, train_set, config.model_copy(update={"seed": seed}), run_dir, eval_set))
    return reports
