import json
import logging
import sys

import pytest

from optomech.config import settings
from optomech.core.logging import CommandFilter, CustomJsonFormatter, resolve_level, setup_logging


class TestLogLevels:
    def test_named_levels(self):
        assert resolve_level("debug") == logging.DEBUG
        assert resolve_level("WARNING") == logging.WARNING

    def test_falls_back_to_settings(self, monkeypatch):
        monkeypatch.setattr(settings, "log_level", "ERROR")
        assert resolve_level(None) == logging.ERROR

    def test_unknown_level(self):
        with pytest.raises(ValueError):
            resolve_level("chatty")


class TestHandlers:
    def test_single_stderr_handler_with_command(self):
        setup_logging("INFO", command="verify")
        handlers = logging.getLogger().handlers
        assert len(handlers) == 1
        assert handlers[0].stream is sys.stderr
        assert any(isinstance(f, CommandFilter) and f.command == "verify" for f in handlers[0].filters)

    def test_json_record_fields(self, monkeypatch):
        monkeypatch.setattr(settings, "environment", "production")
        record = logging.LogRecord("optomech.suites", logging.INFO, __file__, 1, "suite done", None, None)
        CommandFilter("evolve").filter(record)
        payload = json.loads(CustomJsonFormatter("%(message)s").format(record))
        assert payload["message"] == "suite done"
        assert payload["command"] == "evolve"
        assert payload["level"] == "INFO"
        assert payload["environment"] == "production"
        assert payload["version"] == settings.app_version
