"""Argument parsing with typed usage errors."""

import argparse

from slpnet.core.errors import MissingFlagError, UnknownFlagError, UsageError


class CommandParser(argparse.ArgumentParser):
    """``ArgumentParser`` that raises instead of printing usage and exiting.

    Subparsers created through :meth:`add_subparsers` inherit this class.
    """

    def __init__(self, *args, **kwargs):
        kwargs.setdefault("allow_abbrev", False)
        super().__init__(*args, **kwargs)

    def error(self, message: str):
        if message.startswith("unrecognized arguments"):
            raise UnknownFlagError(message)
        if message.startswith("the following arguments are required"):
            raise MissingFlagError(message)
        raise UsageError(message)


def add_common_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("run")
    group.add_argument("--config", help="KEY=value settings file")
    group.add_argument("--seed", type=int, help="seed for every random draw (default 0)")
    group.add_argument("--log-level", help="console log level (default INFO)")
    group.add_argument("--log-file", help="also write JSON-lines logs here")


def add_data_flags(parser: argparse.ArgumentParser, splits: bool = True) -> None:
    group = parser.add_argument_group("data")
    group.add_argument("--data-root", help="corpus root (default 'data')")
    group.add_argument("--image-dir", help="image subdirectory (default 'images')")
    group.add_argument("--mask-dir", help="mask subdirectory (default 'masks')")
    group.add_argument("--mask-suffix", help="mask name = image stem + suffix (default '_segmentation')")
    group.add_argument("--size", type=int, help="network input size, a multiple of 8 (default 224)")
    group.add_argument("--workers", type=int, help="prefetch threads (default 0)")
    if splits:
        group.add_argument("--split-train", help="file of training ids, one per line")
        group.add_argument("--split-test", help="file of test ids, one per line")
        group.add_argument("--train-count", type=int, help="training ids when no split files are given (default 2074)")


def add_model_flags(parser: argparse.ArgumentParser, checkpoint_required: bool = False) -> None:
    parser.add_argument(
        "--checkpoint",
        required=checkpoint_required,
        help="model checkpoint" + ("" if checkpoint_required else " (default: freshly initialised model)"),
    )


def positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value
