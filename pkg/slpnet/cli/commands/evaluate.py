"""eval: score one or more checkpoints on a corpus split."""

import argparse

from slpnet.cli.common import image_size, open_dataset, require_file
from slpnet.cli.parser import add_common_flags, add_data_flags
from slpnet.core.config import Settings
from slpnet.core.errors import EmptySplitError
from slpnet.data.batching import SegmentationDataset, split_corpus
from slpnet.metrics import format_report, format_summary, write_metric_file
from slpnet.nn.checkpoint import load_checkpoint
from slpnet.schemas.metrics import MetricReport
from slpnet.training.trainer import evaluate_checkpoints


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "eval",
        help="evaluate checkpoints",
        description="Compute Acc, Sens, Spec, JI and DSC. Several checkpoints are reported as mean and sample std.",
    )
    parser.add_argument("--checkpoint", nargs="+", required=True, help="one or more checkpoints")
    parser.add_argument("--agg", choices=["per-image", "global"], default="per-image", help="metric aggregation")
    parser.add_argument(
        "--split",
        choices=["test", "train", "all"],
        default="test",
        help="which part of the corpus to score; 'all' for cross-dataset evaluation",
    )
    parser.add_argument("--threshold", type=float, help="binarization threshold, strict (default 0.5)")
    parser.add_argument("--out", help="write key=value metrics here")
    add_data_flags(parser)
    add_common_flags(parser)
    parser.set_defaults(handler=run)


def _select(dataset: SegmentationDataset, split: str, settings: Settings) -> SegmentationDataset:
    if split != "all":
        _, train_set, test_set = split_corpus(dataset, settings.TRAIN_COUNT, settings.SPLIT_TRAIN, settings.SPLIT_TEST)
        dataset = train_set if split == "train" else test_set
    if len(dataset) == 0:
        raise EmptySplitError(f"the {split} split is empty")
    return dataset


def run(args: argparse.Namespace, settings: Settings) -> int:
    paths = [require_file(p, "checkpoint") for p in args.checkpoint]
    size = image_size(settings, load_checkpoint(paths[0]))
    dataset = _select(open_dataset(settings, size), args.split, settings)
    reports, summary = evaluate_checkpoints(paths, dataset, settings.THRESHOLD, args.agg)

    for path, report in zip(paths, reports):
        print(format_report(report.metrics, f"{path} ({report.images} images, {report.mode})"))
    if len(reports) > 1:
        print(format_summary(summary))

    if args.out:
        extra = {"images": reports[0].images, "aggregation": args.agg, "checkpoints": len(reports)}
        if len(reports) > 1:
            extra.update({f"{name}_std": f"{100 * value:.4f}" for name, value in summary.std.items()})
            write_metric_file(args.out, MetricReport(**summary.mean), extra)
        else:
            write_metric_file(args.out, reports[0].metrics, extra)
    return 0
