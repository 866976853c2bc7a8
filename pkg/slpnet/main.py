"""Command-line entry point."""

import logging
import sys
from typing import Optional, Sequence

from pydantic import ValidationError

from slpnet.cli.common import settings_from_args
from slpnet.cli.router import build_parser
from slpnet.core.errors import SLPNetError, UsageError
from slpnet.core.logging import configure_logging

logger = logging.getLogger(__name__)


def _report(name: str, detail: str) -> None:
    # exactly one line on stderr
    print(f"error[{name}]: {' '.join(detail.split())}", file=sys.stderr)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its process exit code."""
    try:
        args = build_parser().parse_args(argv)
        settings = settings_from_args(args)
        configure_logging(settings.LOG_LEVEL, settings.LOG_FILE)
        logger.debug("running %s with %s", args.command, settings.model_dump())
        return args.handler(args, settings)
    except SLPNetError as e:
        _report(type(e).__name__, e.detail)
        return e.exit_code
    except ValidationError as e:
        _report(type(e).__name__, str(e))
        return UsageError.exit_code
    except SystemExit as e:
        # --help and --version
        return e.code if isinstance(e.code, int) else 0
    except KeyboardInterrupt:
        _report("KeyboardInterrupt", "interrupted")
        return 130


if __name__ == "__main__":
    sys.exit(main())
