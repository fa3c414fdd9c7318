"""Structured logging for the slag toolkit.

Every record carries the run context: the subcommand, the coefficient preset and,
when a message concerns one chart, that chart (``extra={"chart": "U01"}``).
"""

import json
import logging
from collections.abc import Mapping
from datetime import datetime, timezone
from logging.handlers import RotatingFileHandler
from pathlib import Path

CONTEXT_FIELDS = ("command", "preset", "chart")
UNSET = "-"

TEXT_FORMAT = "%(asctime)s %(levelname)s [%(command)s %(preset)s %(chart)s] %(name)s: %(message)s"

_RESERVED = frozenset(
    (
        "name",
        "msg",
        "args",
        "created",
        "filename",
        "funcName",
        "levelname",
        "levelno",
        "lineno",
        "module",
        "msecs",
        "pathname",
        "process",
        "processName",
        "relativeCreated",
        "exc_info",
        "exc_text",
        "stack_info",
        "thread",
        "threadName",
        "taskName",
        "message",
        "asctime",
        *CONTEXT_FIELDS,
    )
)


def chart_label(chart) -> str:
    """U01-style label for a chart pair; strings pass through."""
    if isinstance(chart, str):
        return chart
    i, j = chart
    return f"U{i}{j}"


class RunContextFilter(logging.Filter):
    """Stamps command, preset and chart on records that do not set them."""

    def __init__(self, context: Mapping[str, str] | None = None):
        super().__init__()
        context = dict(context or {})
        unknown = set(context) - set(CONTEXT_FIELDS)
        if unknown:
            raise ValueError(f"Unknown log context fields: {sorted(unknown)}")
        self.context = {name: str(context.get(name) or UNSET) for name in CONTEXT_FIELDS}

    def filter(self, record: logging.LogRecord) -> bool:
        for name, value in self.context.items():
            if not hasattr(record, name):
                setattr(record, name, value)
        if record.chart is None:
            record.chart = UNSET
        elif not isinstance(record.chart, str):
            record.chart = chart_label(record.chart)
        return True


class JsonFormatter(logging.Formatter):
    """One JSON object per record; run context at top level, other extras under "extra"."""

    def __init__(self, include_extra: bool = True):
        super().__init__()
        self.include_extra = include_extra

    def format(self, record: logging.LogRecord) -> str:
        log_data = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
        }
        for name in CONTEXT_FIELDS:
            value = getattr(record, name, UNSET)
            if value != UNSET:
                log_data[name] = value
        log_data["function"] = f"{record.module}.{record.funcName}:{record.lineno}"

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        if self.include_extra:
            extra = {k: v for k, v in record.__dict__.items() if k not in _RESERVED}
            if extra:
                log_data["extra"] = extra

        return json.dumps(log_data, ensure_ascii=False, default=str)


def setup_logging(
    level: str = "INFO",
    format_: str = "text",
    log_file: str | None = None,
    max_bytes: int = 10 * 1024 * 1024,
    backup_count: int = 3,
    context: Mapping[str, str] | None = None,
) -> logging.Logger:
    """Setup logging configuration.

    Args:
        level: Log level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        format_: Log format (text or json)
        log_file: Path to log file (optional)
        max_bytes: Maximum log file size before rotation
        backup_count: Number of backup files to keep
        context: Run context, any of command, preset and chart

    Returns:
        Configured logger
    """
    logger = logging.getLogger("slag")
    logger.setLevel(getattr(logging, level.upper()))
    logger.handlers.clear()

    if format_.lower() == "json":
        formatter = JsonFormatter()
    else:
        formatter = logging.Formatter(TEXT_FORMAT, datefmt="%Y-%m-%d %H:%M:%S")
    context_filter = RunContextFilter(context)

    handlers: list[logging.Handler] = [logging.StreamHandler()]
    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(
            RotatingFileHandler(
                log_file,
                maxBytes=max_bytes,
                backupCount=backup_count,
                encoding="utf-8",
            )
        )

    for handler in handlers:
        handler.setLevel(getattr(logging, level.upper()))
        handler.addFilter(context_filter)
        handler.setFormatter(formatter)
        logger.addHandler(handler)

    return logger


def get_logger(name: str) -> logging.Logger:
    """Logger under the ``slag`` hierarchy, without doubling the prefix."""
    if name == "slag" or name.startswith("slag."):
        return logging.getLogger(name)
    return logging.getLogger(f"slag.{name}")
