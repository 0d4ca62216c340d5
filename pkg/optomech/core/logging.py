import logging
import sys
from typing import Optional

from pythonjsonlogger import jsonlogger

from optomech.config import settings

PLAIN_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class CommandFilter(logging.Filter):
    """Stamps every record with the CLI command being run."""

    def __init__(self, command: Optional[str]):
        super().__init__()
        self.command = command or "-"

    def filter(self, record: logging.LogRecord) -> bool:
        record.command = self.command
        return True


class CustomJsonFormatter(jsonlogger.JsonFormatter):
    def add_fields(self, log_record, record, message_dict):
        super().add_fields(log_record, record, message_dict)
        log_record["level"] = record.levelname
        log_record["logger"] = record.name
        log_record["command"] = getattr(record, "command", "-")
        log_record["environment"] = settings.environment
        log_record["version"] = settings.app_version


def resolve_level(level: Optional[str]) -> int:
    name = (level or settings.log_level).upper()
    value = logging.getLevelName(name)
    if not isinstance(value, int):
        raise ValueError(f"unknown log level '{level}'")
    return value


def setup_logging(level: Optional[str] = None, command: Optional[str] = None) -> None:
    numeric = resolve_level(level)
    root_logger = logging.getLogger()
    root_logger.setLevel(numeric)

    for handler in root_logger.handlers[:]:
        root_logger.removeHandler(handler)

    # stdout carries the machine-readable reports
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(numeric)
    handler.addFilter(CommandFilter(command))

    if settings.environment == "production":
        handler.setFormatter(CustomJsonFormatter("%(asctime)s %(levelname)s %(name)s %(message)s"))
    else:
        handler.setFormatter(logging.Formatter(PLAIN_FORMAT, datefmt="%Y-%m-%d %H:%M:%S"))
    root_logger.addHandler(handler)

    root_logger.debug(
        f"Logging configured for {settings.app_name} {settings.app_version} "
        f"({settings.environment}, level {logging.getLevelName(numeric)}, command {command or '-'})"
    )
