"""Logging setup: colored console output or JSON lines."""
import logging
import sys

import colorlog
from pythonjsonlogger.json import JsonFormatter

CONSOLE_FORMAT = "%(log_color)s%(levelname)-8s%(reset)s %(name)s: %(message)s"
JSON_FIELDS = "%(asctime)s %(levelname)s %(name)s %(message)s"


def configure_logging(level: str = "INFO", json_output: bool = False) -> logging.Logger:
    """Install a single stderr handler on the ``sphkit`` logger tree."""
    root = logging.getLogger("sphkit")
    root.handlers.clear()
    handler = logging.StreamHandler(sys.stderr)
    if json_output:
        handler.setFormatter(JsonFormatter(JSON_FIELDS))
    else:
        handler.setFormatter(colorlog.ColoredFormatter(CONSOLE_FORMAT))
    root.addHandler(handler)
    root.setLevel(level.upper())
    root.propagate = False
    return root
