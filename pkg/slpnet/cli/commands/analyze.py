"""analyze: parameter and FLOP table."""

import argparse

from slpnet.analysis.complexity import analyze, format_table, write_report
from slpnet.cli.common import image_size, load_model
from slpnet.cli.parser import add_common_flags, add_model_flags
from slpnet.core.config import Settings


def register(subparsers) -> None:
    parser = subparsers.add_parser("analyze", help="report params and GFLOPs", description="Per-module cost table.")
    parser.add_argument("--size", type=int, help="input size (default 224)")
    add_model_flags(parser)
    parser.add_argument("--out", help="write key=value report here")
    add_common_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    model = load_model(args.checkpoint, settings)
    size = image_size(settings, model)
    report = analyze(model, (size, size))
    print(format_table(report))
    if args.out:
        write_report(report, args.out)
    return 0
