"""Logging setup: plain console lines plus an optional JSON-lines log file."""

import logging
import sys
from pathlib import Path
from typing import Optional, Union

from pythonjsonlogger import jsonlogger

_HANDLER_TAG = "_slpnet_handler"


def configure_logging(
    level: Union[str, int] = "INFO",
    log_file: Optional[Union[str, Path]] = None,
) -> logging.Logger:
    """Configure the ``slpnet`` logger tree.

    Console output carries no timestamps so that it is reproducible run to
    run; the file handler (when requested) writes one JSON object per record.
    Calling this again replaces the handlers it installed previously.
    """
    root = logging.getLogger("slpnet")
    root.setLevel(level if isinstance(level, int) else level.upper())
    root.propagate = False

    for handler in list(root.handlers):
        if getattr(handler, _HANDLER_TAG, False):
            root.removeHandler(handler)
            handler.close()

    console = logging.StreamHandler(sys.stderr)
    console.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    setattr(console, _HANDLER_TAG, True)
    root.addHandler(console)

    if log_file is not None:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = logging.FileHandler(path, encoding="utf-8")
        file_handler.setFormatter(
            jsonlogger.JsonFormatter("%(asctime)s %(levelname)s %(name)s %(message)s")
        )
        setattr(file_handler, _HANDLER_TAG, True)
        root.addHandler(file_handler)

    return root
