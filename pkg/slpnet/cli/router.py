"""Top-level parser that combines every command module."""

from slpnet import __version__
from slpnet.cli.commands import analyze, bench, evaluate, predict, synth, train
from slpnet.cli.parser import CommandParser

COMMANDS = (train, evaluate, predict, analyze, bench, synth)


def build_parser() -> CommandParser:
    parser = CommandParser(
        prog="slpnet",
        description="SLP-Net: lightweight skin-lesion segmentation built from SNP-type neurons.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subparsers = parser.add_subparsers(dest="command", metavar="command", required=True)
    for command in COMMANDS:
        command.register(subparsers)
    return parser
