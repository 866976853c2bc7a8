"""bench: forward throughput."""

import argparse

from slpnet.analysis.bench import bench_fps, format_bench, write_bench
from slpnet.cli.common import image_size, load_model
from slpnet.cli.parser import add_common_flags, add_model_flags, positive_int
from slpnet.core.config import Settings


def register(subparsers) -> None:
    parser = subparsers.add_parser("bench", help="measure FPS", description="Time forward passes on random input.")
    parser.add_argument("--iters", type=positive_int, default=100, help="timed forwards (default 100)")
    parser.add_argument("--warmup", type=int, default=10, help="untimed forwards first (default 10)")
    parser.add_argument("--size", type=int, help="input size (default 224)")
    parser.add_argument("--batch", type=positive_int, default=1, help="images per forward (default 1)")
    parser.add_argument("--instances", type=positive_int, default=1, help="parallel model instances (default 1)")
    add_model_flags(parser)
    parser.add_argument("--out", help="write key=value report here")
    add_common_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    model = load_model(args.checkpoint, settings)
    size = image_size(settings, model)
    report = bench_fps(model, (size, size), args.warmup, args.iters, args.batch, args.instances, settings.SEED)
    print(format_bench(report))
    if args.out:
        write_bench(report, args.out)
    return 0
