"""predict: write binary lesion masks for images."""

import argparse
import logging
from pathlib import Path
from typing import List

import numpy as np
from PIL import Image

from slpnet.cli.common import image_size, load_model
from slpnet.cli.parser import add_common_flags, add_model_flags
from slpnet.core.config import Settings
from slpnet.core.errors import UnreadablePathError
from slpnet.data.loader import IMAGE_EXTENSIONS, load_image
from slpnet.metrics import binarize
from slpnet.training.trainer import predict_probs

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    parser = subparsers.add_parser(
        "predict",
        help="segment images",
        description="Write <stem>_pred.png masks (0/255) at each input's native resolution.",
    )
    add_model_flags(parser)
    parser.add_argument("--input", required=True, help="an image file or a directory of images")
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--size", type=int, help="inference size (default: the checkpoint's, else 224)")
    parser.add_argument("--threshold", type=float, help="binarization threshold, strict (default 0.5)")
    add_common_flags(parser)
    parser.set_defaults(handler=run)


def _inputs(path: Path) -> List[Path]:
    if path.is_file():
        return [path]
    if path.is_dir():
        files = sorted(p for p in path.iterdir() if p.suffix.lower() in IMAGE_EXTENSIONS)
        if files:
            return files
        raise UnreadablePathError(f"no images in {path}")
    raise UnreadablePathError(f"input not found: {path}")


def predict_file(model, path: Path, out_dir: Path, size: int, threshold: float = 0.5) -> Path:
    """Segment one image and write its mask, resized back with nearest neighbour."""
    height, width = load_image(path).shape[1:]
    image = load_image(path, size)
    probs = predict_probs(model, image[None])
    mask = Image.fromarray(binarize(probs[0, 0], threshold) * np.uint8(255), mode="L")
    if mask.size != (width, height):
        mask = mask.resize((width, height), Image.NEAREST)
    target = out_dir / f"{path.stem}_pred.png"
    mask.save(target)
    return target


def run(args: argparse.Namespace, settings: Settings) -> int:
    files = _inputs(Path(args.input))
    model = load_model(args.checkpoint, settings)
    size = image_size(settings, model)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for path in files:
        target = predict_file(model, path, out_dir, size, settings.THRESHOLD)
        logger.info("%s -> %s", path.name, target)
    print(f"wrote {len(files)} mask(s) to {out_dir}")
    return 0
