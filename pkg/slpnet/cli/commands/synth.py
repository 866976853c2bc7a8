"""gen-synth: write the synthetic disc corpus."""

import argparse

from slpnet.cli.parser import add_common_flags, positive_int
from slpnet.core.config import Settings
from slpnet.data.synth import write_corpus


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "gen-synth",
        help="write a synthetic corpus",
        description="One lighter disc per image on a dark textured background, in the loader's layout.",
    )
    parser.add_argument("--out", required=True, help="corpus root to create")
    parser.add_argument("--count", type=positive_int, default=8, help="number of pairs (default 8)")
    parser.add_argument("--size", type=int, help="image size (default 224)")
    parser.add_argument("--image-dir", help="image subdirectory (default 'images')")
    parser.add_argument("--mask-dir", help="mask subdirectory (default 'masks')")
    parser.add_argument("--mask-suffix", help="mask name suffix (default '_segmentation')")
    add_common_flags(parser)
    parser.set_defaults(handler=run)


def run(args: argparse.Namespace, settings: Settings) -> int:
    out = write_corpus(
        args.out,
        count=args.count,
        seed=settings.SEED,
        size=settings.IMAGE_SIZE,
        image_dir=settings.IMAGE_DIR,
        mask_dir=settings.MASK_DIR,
        mask_suffix=settings.MASK_SUFFIX,
    )
    print(f"wrote {args.count} image/mask pairs to {out}")
    return 0
