from slpnet.cli.router import build_parser

__all__ = ["build_parser"]
