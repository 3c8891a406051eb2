"""Tests for logging setup."""
import io
import json
import logging

import colorlog
from pythonjsonlogger.json import JsonFormatter

from sphkit.logs import configure_logging


class TestConfigureLogging:
    """Tests for configure_logging."""

    def teardown_method(self):
        logging.getLogger("sphkit").handlers.clear()

    def test_console(self):
        logger = configure_logging("debug")
        assert logger.level == logging.DEBUG
        (handler,) = logger.handlers
        assert isinstance(handler.formatter, colorlog.ColoredFormatter)

    def test_json_lines(self):
        logger = configure_logging("INFO", json_output=True)
        (handler,) = logger.handlers
        assert isinstance(handler.formatter, JsonFormatter)
        stream = io.StringIO()
        handler.setStream(stream)

        logging.getLogger("sphkit.services").info("stage finished", extra={"stage": "analyze", "passed": True})

        record = json.loads(stream.getvalue())
        assert record["message"] == "stage finished"
        assert record["stage"] == "analyze"
        assert record["name"] == "sphkit.services"

    def test_reconfigure_replaces_handler(self):
        configure_logging()
        logger = configure_logging(json_output=True)
        assert len(logger.handlers) == 1
