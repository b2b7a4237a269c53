"""
Structured logging configuration.
JSON lines in production, coloured single lines everywhere else.
"""
import logging
import sys
import json
from datetime import datetime, timezone
from typing import Optional
from pathlib import Path

from hugkit.core.config import settings


# Extra attributes copied from LogRecord into structured output
EXTRA_FIELDS = (
    "request_id",
    "run_id",
    "event",
    "suite",
    "iteration",
    "duration_ms",
    "error_code",
    "details",
)


class JSONFormatter(logging.Formatter):
    """
    JSON formatter for structured logging.
    Outputs one object per line for log aggregators.
    """
    def format(self, record: logging.LogRecord) -> str:
        log_data = {
            "timestamp": datetime.now(timezone.utc).isoformat().replace("+00:00", "Z"),
            "level": record.levelname,
            "logger": record.name,
            "message": record.getMessage(),
            "module": record.module,
            "function": record.funcName,
            "line": record.lineno
        }

        for field in EXTRA_FIELDS:
            if hasattr(record, field):
                log_data[field] = getattr(record, field)

        if record.exc_info:
            log_data["exception"] = self.formatException(record.exc_info)

        return json.dumps(log_data, default=str)


class SimpleFormatter(logging.Formatter):
    """
    Simple colored formatter for development environments.
    """
    COLORS = {
        "DEBUG": "\033[36m",     # Cyan
        "INFO": "\033[32m",      # Green
        "WARNING": "\033[33m",   # Yellow
        "ERROR": "\033[31m",     # Red
        "CRITICAL": "\033[35m",  # Magenta
    }
    RESET = "\033[0m"

    def format(self, record: logging.LogRecord) -> str:
        color = self.COLORS.get(record.levelname, self.RESET)
        timestamp = datetime.now().strftime("%Y-%m-%d %H:%M:%S")

        message = f"{color}[{timestamp}] {record.levelname:8}{self.RESET} | {record.name} | {record.getMessage()}"

        if hasattr(record, "run_id"):
            message += f" | run={record.run_id}"
        if hasattr(record, "iteration"):
            message += f" | it={record.iteration}"
        if hasattr(record, "request_id"):
            message += f" | req_id={record.request_id}"
        if hasattr(record, "duration_ms"):
            message += f" | {record.duration_ms}ms"

        return message


def setup_logging() -> None:
    """
    Configure logging based on environment settings.
    Logs go to stderr so CLI commands keep stdout for JSON results.
    """
    log_level = getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)
    root_logger.handlers = []

    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)

    if settings.is_production:
        console_handler.setFormatter(JSONFormatter())
    else:
        console_handler.setFormatter(SimpleFormatter())

    root_logger.addHandler(console_handler)

    if settings.is_production:
        log_dir = Path("logs")
        log_dir.mkdir(exist_ok=True)

        file_handler = logging.FileHandler(log_dir / "hugkit.log")
        file_handler.setLevel(log_level)
        file_handler.setFormatter(JSONFormatter())
        root_logger.addHandler(file_handler)

    # Third-party noise
    logging.getLogger("uvicorn").setLevel(logging.WARNING)
    logging.getLogger("numba").setLevel(logging.WARNING)


def get_logger(name: str) -> logging.Logger:
    """Get a logger with the given name."""
    return logging.getLogger(name)


class ExperimentLogger:
    """
    Event logger for experiment runs and verification suites.
    Records what ran, with which seed, and how it ended.
    """
    def __init__(self):
        self.logger = logging.getLogger("hugkit.events")

    def log_event(
        self,
        event: str,
        run_id: Optional[str] = None,
        iteration: Optional[int] = None,
        suite: Optional[str] = None,
        duration_ms: Optional[float] = None,
        details: Optional[dict] = None,
        level: int = logging.INFO
    ) -> None:
        """
        Log a run event.

        Args:
            event: Event name (e.g., "run.start", "verify.suite")
            run_id: Identifier of the run for correlation
            iteration: Optimizer iteration, when applicable
            suite: Verification suite name, when applicable
            duration_ms: Elapsed wall time
            details: Additional structured payload
            level: Logging level
        """
        extra = {"event": event, "details": details or {}}
        if run_id is not None:
            extra["run_id"] = run_id
        if iteration is not None:
            extra["iteration"] = iteration
        if suite is not None:
            extra["suite"] = suite
        if duration_ms is not None:
            extra["duration_ms"] = duration_ms

        self.logger.log(level, f"EVENT: {event}", extra=extra)


# Global experiment logger instance
experiment_logger = ExperimentLogger()
